#include "msplab.h"

#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "core/bounds.hpp"
#include "core/config.hpp"
#include "core/experiments.hpp"
#include "core/fourier.hpp"
#include "core/verify.hpp"

struct msplab_fourier {
  msplab::FourierFunction f;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int fail(int code, const char* msg) {
  g_last_error = msg;
  return code;
}

// run fn under the shared exception-to-status mapping
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const msplab::ConfigError& e) {
    return fail(MSPLAB_EINVAL, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(MSPLAB_EINVAL, e.what());
  } catch (const std::exception& e) {
    return fail(MSPLAB_EINTERNAL, e.what());
  } catch (...) {
    return fail(MSPLAB_EINTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* msplab_version(void) { return msplab::kVersion; }

const char* msplab_last_error(void) { return g_last_error.c_str(); }

void msplab_free(char* s) { delete[] s; }

int msplab_fourier_parse(const char* text, msplab_fourier** out) {
  if (!text || !out) return fail(MSPLAB_EINVAL, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new msplab_fourier{msplab::fourier_parse(text)};
    return MSPLAB_OK;
  });
}

int msplab_fourier_format(const msplab_fourier* f, char** out) {
  if (!f || !out) return fail(MSPLAB_EINVAL, "null argument");
  return guarded([&] {
    *out = dup_string(msplab::fourier_format(f->f));
    return MSPLAB_OK;
  });
}

int msplab_fourier_dim(const msplab_fourier* f) { return f ? f->f.P : -1; }

double msplab_fourier_eval(const msplab_fourier* f, unsigned mask) {
  if (!f) return 0.0;
  return f->f.eval_mask(mask & ((1u << f->f.P) - 1u));
}

void msplab_fourier_release(msplab_fourier* f) { delete f; }

int msplab_msp_report(const msplab_fourier* f, char** out) {
  if (!f || !out) return fail(MSPLAB_EINVAL, "null argument");
  return guarded([&] {
    *out = dup_string(msplab::msp_report(msplab::msp_check(f->f)));
    return MSPLAB_OK;
  });
}

int msplab_msp_query(const msplab_fourier* f, int* is_msp, int* leap) {
  if (!f) return fail(MSPLAB_EINVAL, "null argument");
  return guarded([&] {
    const auto m = msplab::msp_check(f->f);
    if (is_msp) *is_msp = m.is_msp ? 1 : 0;
    if (leap) *leap = m.leap;
    return MSPLAB_OK;
  });
}

int msplab_polyk_bound(int d, int k, int m, double slack, double* out) {
  if (!out) return fail(MSPLAB_EINVAL, "null argument");
  return guarded([&] {
    *out = msplab::polyk_bound(d, k, m, slack).value;
    return MSPLAB_OK;
  });
}

int msplab_staircase_bound(int d, int P, double slack, double* out) {
  if (!out) return fail(MSPLAB_EINVAL, "null argument");
  return guarded([&] {
    *out = msplab::staircase_bound(d, P, slack).value;
    return MSPLAB_OK;
  });
}

int msplab_run(const char* config_text, const char* out_dir, char** report, char** files) {
  if (!config_text || !out_dir || !report) return fail(MSPLAB_EINVAL, "null argument");
  *report = nullptr;
  if (files) *files = nullptr;
  return guarded([&] {
    const auto r = msplab::run_experiment(msplab::config_parse(config_text), out_dir);
    *report = dup_string(r.report);
    if (files) {
      std::string joined;
      for (const auto& p : r.files) {
        if (!joined.empty()) joined += '\n';
        joined += p;
      }
      *files = dup_string(joined);
    }
    if (r.exit_code != MSPLAB_OK) g_last_error = "experiment finished with status " +
                                                 std::to_string(r.exit_code);
    return r.exit_code;
  });
}

int msplab_preset(const char* name, char** config_text) {
  if (!name || !config_text) return fail(MSPLAB_EINVAL, "null argument");
  return guarded([&] {
    *config_text = dup_string(msplab::config_format(msplab::preset_config(name)));
    return MSPLAB_OK;
  });
}

int msplab_preset_names(char** names_csv) {
  if (!names_csv) return fail(MSPLAB_EINVAL, "null argument");
  return guarded([&] {
    std::string joined;
    for (const auto& n : msplab::preset_names()) {
      if (!joined.empty()) joined += ',';
      joined += n;
    }
    *names_csv = dup_string(joined);
    return MSPLAB_OK;
  });
}

int msplab_config_set(const char* config_text, const char* section, const char* key,
                      const char* value, char** out) {
  if (!config_text || !section || !key || !value || !out)
    return fail(MSPLAB_EINVAL, "null argument");
  return guarded([&] {
    auto c = msplab::config_parse(config_text);
    c.set(section, key, value);
    *out = dup_string(msplab::config_format(c));
    return MSPLAB_OK;
  });
}

int msplab_config_get(const char* config_text, const char* section, const char* key, char** out) {
  if (!config_text || !section || !key || !out) return fail(MSPLAB_EINVAL, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto c = msplab::config_parse(config_text);
    if (auto v = c.find(section, key)) *out = dup_string(*v);
    return MSPLAB_OK;
  });
}

int msplab_verify(int level, char** report) {
  if (!report) return fail(MSPLAB_EINVAL, "null argument");
  if (level != 0 && level != 1) return fail(MSPLAB_EINVAL, "level must be 0 or 1");
  return guarded([&] {
    const auto r = msplab::run_verify(level == 0 ? msplab::VerifyLevel::Quick
                                                 : msplab::VerifyLevel::Full);
    *report = dup_string(msplab::verify_report(r));
    if (r.all_pass()) return MSPLAB_OK;
    g_last_error = "verification checks failed";
    return MSPLAB_EVERIFY;
  });
}

}  // extern "C"
