#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kgc/kgc.h"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
};

int config_error(const char *what) {
  std::fprintf(stderr, "configuration error: %s\n", what);
  return 4;
}

int status_exit(kgc_status st) {
  if (st == KGC_ERR_CONFIG || st == KGC_ERR_ARGUMENT)
    return config_error(kgc_last_error());
  std::fprintf(stderr, "error: %s\n", kgc_last_error());
  return 1;
}

kgc_status apply(kgc_scenario *s, const Overrides &o) {
  kgc_status st = KGC_OK;
  if (o.tolerance && (st = kgc_scenario_set_tolerance(s, *o.tolerance)) != KGC_OK)
    return st;
  if (o.seed && (st = kgc_scenario_set_seed(s, *o.seed)) != KGC_OK)
    return st;
  if (o.grid && (st = kgc_scenario_set_grid(s, *o.grid)) != KGC_OK)
    return st;
  return st;
}

/// Runs one scenario, prints the summary, emits into dir when given.
int run_one(kgc_scenario *s, const std::string &dir) {
  kgc_report *r = nullptr;
  if (kgc_status st = kgc_run(s, &r); st != KGC_OK)
    return status_exit(st);
  int code = kgc_report_exit_code(r);
  if (!dir.empty() && kgc_report_emit(r, dir.c_str()) != KGC_OK) {
    std::fprintf(stderr, "error: %s\n", kgc_last_error());
    code = 1;
  }
  std::fputs(kgc_report_summary(r), stdout);
  kgc_report_free(r);
  return code;
}

int load_and_run(const Overrides &o, const char *checks) {
  kgc_scenario *s = nullptr;
  if (kgc_status st = kgc_scenario_load(o.config.c_str(), &s); st != KGC_OK)
    return status_exit(st);
  kgc_status st = apply(s, o);
  if (st == KGC_OK && checks)
    st = kgc_scenario_set_checks(s, checks);
  const int code = st == KGC_OK ? run_one(s, o.out) : status_exit(st);
  kgc_scenario_free(s);
  return code;
}

void add_overrides(CLI::App *app, Overrides &o) {
  app->add_option("--out", o.out, "directory for CSV files and the summary");
  app->add_option("--tolerance", o.tolerance, "integrator tolerance");
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--grid", o.grid, "number of grid radii after the window start");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Growth-estimate verification toolkit"};
  app.set_version_flag("--version", kgc_version());
  app.require_subcommand(1);

  Overrides o;
  auto *audit = app.add_subcommand("audit", "audit the coefficient hypotheses of a scenario");
  audit->add_option("--config", o.config, "scenario file")->required();
  add_overrides(audit, o);

  auto *run = app.add_subcommand("run", "run every check a scenario requests");
  run->add_option("--config", o.config, "scenario file")->required();
  add_overrides(run, o);

  auto *suite = app.add_subcommand("suite", "run the built-in scenario catalog");
  add_overrides(suite, o);

  auto *lemma = app.add_subcommand("lemma-a", "randomized monotonicity-oracle suite");
  lemma->add_option("--seed", o.seed, "random seed");
  lemma->add_option("--out", o.out, "directory for the summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  if (*audit)
    return load_and_run(o, "audit");
  if (*run)
    return load_and_run(o, nullptr);
  if (*lemma) {
    kgc_report *r = nullptr;
    if (kgc_status st = kgc_lemma_a(o.seed.value_or(20240607), &r); st != KGC_OK)
      return status_exit(st);
    int code = kgc_report_exit_code(r);
    if (!o.out.empty() && kgc_report_emit(r, o.out.c_str()) != KGC_OK) {
      std::fprintf(stderr, "error: %s\n", kgc_last_error());
      code = 1;
    }
    std::fputs(kgc_report_summary(r), stdout);
    kgc_report_free(r);
    return code;
  }

  int worst = 0;
  for (size_t i = 0; i < kgc_catalog_size(); ++i) {
    kgc_scenario *s = nullptr;
    if (kgc_status st = kgc_catalog_get(i, &s); st != KGC_OK)
      return status_exit(st);
    int code;
    if (kgc_status st = apply(s, o); st != KGC_OK) {
      code = status_exit(st);
    } else {
      const std::string dir = o.out.empty() ? "" : o.out + "/" + kgc_scenario_name(s);
      code = run_one(s, dir);
    }
    std::printf("== %s: exit %d\n\n", kgc_scenario_name(s), code);
    kgc_scenario_free(s);
    if (code == 2 || code == 1 || code == 4 || (code == 3 && worst == 0))
      worst = (worst == 2 || worst == 1 || worst == 4) ? worst : code;
  }
  return worst;
}
