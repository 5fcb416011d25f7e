#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "msplab.h"

namespace {

// wrap a char* result so every path releases it through msplab_free
std::string take(char* s) {
  std::string out = s ? s : "";
  msplab_free(s);
  return out;
}

const char* kChain =
    "P=3\n"
    "S=1 alpha=1\n"
    "S=1,2 alpha=1\n"
    "S=1,2,3 alpha=1\n";

}  // namespace

TEST_CASE("version string is set") {
  CHECK(std::strlen(msplab_version()) > 0);
}

TEST_CASE("fourier handles round-trip through the text format") {
  msplab_fourier* f = nullptr;
  REQUIRE(msplab_fourier_parse(kChain, &f) == MSPLAB_OK);
  REQUIRE(f != nullptr);
  CHECK(msplab_fourier_dim(f) == 3);
  CHECK(msplab_fourier_eval(f, 0b111u) == doctest::Approx(3.0));
  CHECK(msplab_fourier_eval(f, 0b110u) == doctest::Approx(-3.0));

  char* text = nullptr;
  REQUIRE(msplab_fourier_format(f, &text) == MSPLAB_OK);
  std::string t = take(text);
  msplab_fourier* g = nullptr;
  REQUIRE(msplab_fourier_parse(t.c_str(), &g) == MSPLAB_OK);
  for (unsigned mask = 0; mask < 8; ++mask)
    CHECK(msplab_fourier_eval(g, mask) == doctest::Approx(msplab_fourier_eval(f, mask)));
  msplab_fourier_release(g);
  msplab_fourier_release(f);
}

TEST_CASE("invalid arguments set the error message") {
  msplab_fourier* f = nullptr;
  CHECK(msplab_fourier_parse(nullptr, &f) == MSPLAB_EINVAL);
  CHECK(std::strlen(msplab_last_error()) > 0);
  CHECK(msplab_fourier_parse("S=1 alpha=1\n", &f) == MSPLAB_EINVAL);  // missing header
  CHECK(msplab_fourier_parse(kChain, nullptr) == MSPLAB_EINVAL);
}

TEST_CASE("msp classification through the C surface") {
  msplab_fourier* f = nullptr;
  REQUIRE(msplab_fourier_parse(kChain, &f) == MSPLAB_OK);
  char* rep = nullptr;
  REQUIRE(msplab_msp_report(f, &rep) == MSPLAB_OK);
  CHECK(take(rep) == "MSP: yes, leap 1, ordering {1}<{1,2}<{1,2,3}");
  int is_msp = 0, leap = -1;
  REQUIRE(msplab_msp_query(f, &is_msp, &leap) == MSPLAB_OK);
  CHECK(is_msp == 1);
  CHECK(leap == 1);
  msplab_fourier_release(f);

  msplab_fourier* parity = nullptr;
  REQUIRE(msplab_fourier_parse("P=3\nS=1,2,3 alpha=1\n", &parity) == MSPLAB_OK);
  REQUIRE(msplab_msp_query(parity, &is_msp, &leap) == MSPLAB_OK);
  CHECK(is_msp == 0);
  CHECK(leap == 3);
  msplab_fourier_release(parity);
}

TEST_CASE("bound helpers match their closed forms") {
  double v = 0.0;
  REQUIRE(msplab_polyk_bound(4, 2, 1, 1.0, &v) == MSPLAB_OK);
  CHECK(v == 6.0);
  REQUIRE(msplab_staircase_bound(10, 4, 1.0, &v) == MSPLAB_OK);
  CHECK(v == 22.5);
  CHECK(msplab_polyk_bound(2, 3, 1, 1.0, &v) == MSPLAB_EINVAL);
  CHECK(msplab_polyk_bound(4, 2, 1, 1.0, nullptr) == MSPLAB_EINVAL);
}

TEST_CASE("preset catalogue") {
  char* names = nullptr;
  REQUIRE(msplab_preset_names(&names) == MSPLAB_OK);
  std::string csv = take(names);
  CHECK(csv.find("fig1") != std::string::npos);
  CHECK(csv.find("msp-h2") != std::string::npos);

  char* cfg = nullptr;
  REQUIRE(msplab_preset("msp-h2", &cfg) == MSPLAB_OK);
  std::string text = take(cfg);
  CHECK(text.find("kind = msp-check") != std::string::npos);
  CHECK(msplab_preset("no-such-preset", &cfg) == MSPLAB_EINVAL);
}

TEST_CASE("config edit helpers") {
  char* out = nullptr;
  REQUIRE(msplab_config_set("kind = msp-check\n", "target", "P", "2", &out) == MSPLAB_OK);
  std::string text = take(out);
  REQUIRE(msplab_config_get(text.c_str(), "target", "P", &out) == MSPLAB_OK);
  CHECK(take(out) == "2");
  REQUIRE(msplab_config_get(text.c_str(), "target", "missing", &out) == MSPLAB_OK);
  CHECK(out == nullptr);
  CHECK(msplab_config_get("not a config", "", "kind", &out) == MSPLAB_EINVAL);
}

TEST_CASE("a full run writes its outputs") {
  namespace fs = std::filesystem;
  char* cfg = nullptr;
  REQUIRE(msplab_preset("msp-h2", &cfg) == MSPLAB_OK);
  std::string config = take(cfg);

  const fs::path dir = fs::temp_directory_path() / "msplab_capi_run";
  fs::remove_all(dir);
  char* report = nullptr;
  char* files = nullptr;
  REQUIRE(msplab_run(config.c_str(), dir.string().c_str(), &report, &files) == MSPLAB_OK);
  std::string rep = take(report);
  std::string flist = take(files);
  CHECK(rep.find("MSP: yes") != std::string::npos);
  REQUIRE(!flist.empty());
  for (std::size_t pos = 0; pos < flist.size();) {
    std::size_t nl = flist.find('\n', pos);
    if (nl == std::string::npos) nl = flist.size();
    const std::string path = flist.substr(pos, nl - pos);
    if (!path.empty()) CHECK(fs::exists(path));
    pos = nl + 1;
  }
  fs::remove_all(dir);

  CHECK(msplab_run("kind = no-such-kind\n", dir.string().c_str(), &report, &files) ==
        MSPLAB_EINVAL);
}

TEST_CASE("verify rejects unknown levels") {
  char* rep = nullptr;
  CHECK(msplab_verify(2, &rep) == MSPLAB_EINVAL);
}
