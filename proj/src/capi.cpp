#include "kgc/kgc.h"

#include <sstream>
#include <string>

#include "kgc/scenario.hpp"

struct kgc_scenario {
  kgc::Scenario s;
};

struct kgc_report {
  kgc::RunReport r;
  std::string summary;
};

namespace {

thread_local std::string last_error;

kgc_status fail(kgc_status st, const std::string &msg) {
  last_error = msg;
  return st;
}

template <class F> kgc_status guarded(F &&f) {
  try {
    last_error.clear();
    return f();
  } catch (const kgc::ConfigError &e) {
    return fail(KGC_ERR_CONFIG, e.what());
  } catch (const kgc::InvalidArgument &e) {
    return fail(KGC_ERR_ARGUMENT, e.what());
  } catch (const std::exception &e) {
    return fail(KGC_ERR_RUNTIME, e.what());
  }
}

kgc_status set_checked(kgc_scenario *s, void (*apply)(kgc::Scenario &, const void *), const void *arg) {
  if (!s)
    return fail(KGC_ERR_ARGUMENT, "null scenario");
  return guarded([&] {
    auto copy = s->s;
    apply(copy, arg);
    copy.validate();
    s->s = std::move(copy);
    return KGC_OK;
  });
}

} // namespace

extern "C" {

const char *kgc_version(void) {
  static const std::string v(kgc::version());
  return v.c_str();
}

const char *kgc_last_error(void) { return last_error.c_str(); }

kgc_status kgc_scenario_parse(const char *text, kgc_scenario **out) {
  if (!text || !out)
    return fail(KGC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new kgc_scenario{kgc::parse_scenario(text)};
    return KGC_OK;
  });
}

kgc_status kgc_scenario_load(const char *path, kgc_scenario **out) {
  if (!path || !out)
    return fail(KGC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new kgc_scenario{kgc::load_scenario(path)};
    return KGC_OK;
  });
}

size_t kgc_catalog_size(void) { return kgc::scenario_catalog().size(); }

kgc_status kgc_catalog_get(size_t index, kgc_scenario **out) {
  if (!out)
    return fail(KGC_ERR_ARGUMENT, "null argument");
  if (index >= kgc::scenario_catalog().size())
    return fail(KGC_ERR_ARGUMENT, "catalog index out of range");
  return guarded([&] {
    *out = new kgc_scenario{kgc::scenario_catalog()[index]};
    return KGC_OK;
  });
}

void kgc_scenario_free(kgc_scenario *s) { delete s; }

const char *kgc_scenario_name(const kgc_scenario *s) { return s ? s->s.name.c_str() : ""; }

kgc_status kgc_scenario_set_tolerance(kgc_scenario *s, double tolerance) {
  return set_checked(
      s, [](kgc::Scenario &x, const void *a) { x.tolerance = *static_cast<const double *>(a); }, &tolerance);
}

kgc_status kgc_scenario_set_seed(kgc_scenario *s, uint64_t seed) {
  return set_checked(
      s, [](kgc::Scenario &x, const void *a) { x.seed = *static_cast<const uint64_t *>(a); }, &seed);
}

kgc_status kgc_scenario_set_grid(kgc_scenario *s, int grid) {
  return set_checked(
      s, [](kgc::Scenario &x, const void *a) { x.grid = *static_cast<const int *>(a); }, &grid);
}

kgc_status kgc_scenario_set_checks(kgc_scenario *s, const char *checks) {
  if (!checks)
    return fail(KGC_ERR_ARGUMENT, "null checks");
  return set_checked(
      s,
      [](kgc::Scenario &x, const void *a) {
        std::istringstream in(static_cast<const char *>(a));
        x.checks.clear();
        for (std::string item; std::getline(in, item, ',');)
          if (!item.empty())
            x.checks.push_back(item);
      },
      checks);
}

kgc_status kgc_run(const kgc_scenario *s, kgc_report **out) {
  if (!s || !out)
    return fail(KGC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new kgc_report{kgc::run(s->s), {}};
    return KGC_OK;
  });
}

kgc_status kgc_lemma_a(uint64_t seed, kgc_report **out) {
  if (!out)
    return fail(KGC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    kgc::Scenario s;
    s.name = "lemma-a";
    s.seed = seed;
    s.checks = {std::string(kgc::checks::lemma_a)};
    *out = new kgc_report{kgc::run(s), {}};
    return KGC_OK;
  });
}

int kgc_report_exit_code(const kgc_report *r) { return r ? r->r.exit_code() : 4; }

const char *kgc_report_summary(const kgc_report *r) {
  if (!r)
    return "";
  auto *m = const_cast<kgc_report *>(r);
  m->summary = r->r.summary();
  return m->summary.c_str();
}

kgc_status kgc_report_emit(kgc_report *r, const char *dir) {
  if (!r || !dir)
    return fail(KGC_ERR_ARGUMENT, "null argument");
  try {
    last_error.clear();
    kgc::emit(r->r, dir);
    return KGC_OK;
  } catch (const std::exception &e) {
    return fail(KGC_ERR_IO, e.what());
  }
}

void kgc_report_free(kgc_report *r) { delete r; }

} // extern "C"
