// msplab command line: a thin shell over the C API in msplab.h.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "msplab.h"

namespace {

// adopt a C-API string and release it
std::string take(char* s) {
  std::string out = s ? s : "";
  msplab_free(s);
  return out;
}

int fail_invalid(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return MSPLAB_EINVAL;
}

struct RunArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool csv = false;
  CLI::Option* seed_opt = nullptr;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  auto* config =
      cmd->add_option("--config", args.config_path, "config file describing the run");
  auto* preset = cmd->add_option("--preset", args.preset, "built-in preset name");
  config->excludes(preset);
  preset->excludes(config);
  args.seed_opt = cmd->add_option("--seed", args.seed, "override the root seed");
  cmd->add_option("--out", args.out_dir, "output directory (default runs/<name>)");
  cmd->add_flag("--csv", args.csv, "stream the primary CSV trace to stdout");
}

int set_key(std::string& text, const char* key, const std::string& value) {
  char* t = nullptr;
  if (int rc = msplab_config_set(text.c_str(), "", key, value.c_str(), &t); rc != MSPLAB_OK)
    return rc;
  text = take(t);
  return MSPLAB_OK;
}

// force_kind: training verbs always rewrite the kind; diagnostic verbs only
// fill it in when the config leaves it out, so presets keep their own kind.
int run_command(const RunArgs& args, const char* kind, bool force_kind) {
  std::string text;
  if (!args.preset.empty()) {
    char* t = nullptr;
    if (msplab_preset(args.preset.c_str(), &t) != MSPLAB_OK)
      return fail_invalid(msplab_last_error());
    text = take(t);
  } else if (!args.config_path.empty()) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) return fail_invalid("cannot read config file: " + args.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    return fail_invalid("need --config <path> or --preset <name>");
  }

  char* existing = nullptr;
  if (msplab_config_get(text.c_str(), "", "kind", &existing) != MSPLAB_OK)
    return fail_invalid(msplab_last_error());
  const bool has_kind = existing != nullptr;
  msplab_free(existing);
  if (force_kind || !has_kind)
    if (set_key(text, "kind", kind) != MSPLAB_OK) return fail_invalid(msplab_last_error());
  if (args.seed_opt->count() > 0)
    if (set_key(text, "seed", std::to_string(args.seed)) != MSPLAB_OK)
      return fail_invalid(msplab_last_error());

  std::string out_dir = args.out_dir;
  if (out_dir.empty()) {
    char* v = nullptr;
    msplab_config_get(text.c_str(), "", "name", &v);
    std::string name = take(v);
    if (name.empty())
      name = !args.preset.empty() ? args.preset
                                  : std::filesystem::path(args.config_path).stem().string();
    if (name.empty()) name = kind;
    out_dir = "runs/" + name;
  }

  char* report = nullptr;
  char* files = nullptr;
  const int rc = msplab_run(text.c_str(), out_dir.c_str(), &report, &files);
  const std::string rep = take(report);
  const std::string file_list = take(files);
  if (rc == MSPLAB_EINVAL) return fail_invalid(msplab_last_error());

  std::ostream& rep_out = args.csv ? std::cerr : std::cout;
  if (!rep.empty()) rep_out << rep << (rep.back() == '\n' ? "" : "\n");
  rep_out << "outputs: " << out_dir << "\n";
  if (args.csv) {
    std::string csv_path;
    std::istringstream fl(file_list);
    for (std::string line; std::getline(fl, line);)
      if (line.size() > 4 && line.compare(line.size() - 4, 4, ".csv") == 0) {
        csv_path = line;
        break;
      }
    if (csv_path.empty()) {
      std::cerr << "warning: this run kind writes no CSV\n";
    } else {
      std::ifstream in(csv_path, std::ios::binary);
      std::cout << in.rdbuf();
    }
  }
  if (rc != MSPLAB_OK) std::cerr << "error: " << msplab_last_error() << "\n";
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field staircase laboratory"};
  app.set_version_flag("--version", msplab_version());
  app.require_subcommand(1);

  struct Verb {
    const char* name;
    const char* kind;
    bool force;
    const char* help;
  };
  const Verb verbs[] = {
      {"msp-check", "msp-check", false, "classify a target against the merged-staircase property"},
      {"train-sgd", "train-sgd", true, "train a two-layer network with batch SGD"},
      {"train-dfpde", "train-dfpde", true, "integrate the dimension-free mean-field dynamics"},
      {"two-phase", "two-phase-certify", false, "certify convergence via the two-phase analysis"},
      {"recurrence-verify", "recurrence-verify", false,
       "check coefficient-growth recurrences and leading orders"},
      {"lower-bound", "lower-bound-sweep", false, "tabulate linear-method dimension lower bounds"},
      {"compare", "fig1-compare", false, "run a preset comparison or diagnostic experiment"},
  };

  RunArgs args[std::size(verbs)];
  CLI::App* cmds[std::size(verbs)];
  for (std::size_t i = 0; i < std::size(verbs); ++i) {
    cmds[i] = app.add_subcommand(verbs[i].name, verbs[i].help);
    add_run_options(cmds[i], args[i]);
  }

  auto* verify_cmd = app.add_subcommand("verify", "run the built-in self checks");
  std::string level = "quick";
  verify_cmd->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : MSPLAB_EINVAL;
  }

  if (verify_cmd->parsed()) {
    char* report = nullptr;
    const int rc = msplab_verify(level == "full" ? 1 : 0, &report);
    const std::string rep = take(report);
    if (!rep.empty()) std::cout << rep << (rep.back() == '\n' ? "" : "\n");
    if (rc != MSPLAB_OK && rc != MSPLAB_EVERIFY) std::cerr << "error: " << msplab_last_error() << "\n";
    return rc;
  }
  for (std::size_t i = 0; i < std::size(verbs); ++i)
    if (cmds[i]->parsed()) return run_command(args[i], verbs[i].kind, verbs[i].force);
  return MSPLAB_EINVAL;
}
