#include "kgc/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "numfmt.hpp"

namespace kgc {

namespace {

std::string where(const YAML::Node &n) {
  const auto m = n.Mark();
  return m.line >= 0 ? "line " + std::to_string(m.line + 1) + ": " : "";
}

[[noreturn]] void fail(const YAML::Node &n, const std::string &what) { throw ConfigError(where(n) + what); }

void only_keys(const YAML::Node &map, const std::set<std::string> &allowed, const std::string &ctx) {
  if (!map.IsMap())
    fail(map, ctx + " must be a table");
  for (const auto &kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key))
      fail(kv.first, "unknown key '" + key + "' in " + ctx);
  }
}

template <class T> T get(const YAML::Node &n, const std::string &key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception &) {
    fail(n, "key '" + key + "' has the wrong type");
  }
}

template <class T> void opt(const YAML::Node &map, const std::string &key, T &out) {
  if (const auto n = map[key])
    out = get<T>(n, key);
}

std::vector<double> doubles(const YAML::Node &n, const std::string &key) {
  if (!n.IsSequence())
    fail(n, "key '" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto &x : n)
    out.push_back(get<double>(x, key));
  return out;
}

/// Either a real number or a [re, im] pair.
cplx complex_value(const YAML::Node &n, const std::string &key) {
  if (n.IsSequence()) {
    if (n.size() != 2)
      fail(n, "key '" + key + "': complex entries are [re, im]");
    return {get<double>(n[0], key), get<double>(n[1], key)};
  }
  return get<double>(n, key);
}

std::vector<cplx> complexes(const YAML::Node &n, const std::string &key) {
  if (!n.IsSequence())
    fail(n, "key '" + key + "' must be a list");
  std::vector<cplx> out;
  for (const auto &x : n)
    out.push_back(complex_value(x, key));
  return out;
}

PowerLaw power_law(const YAML::Node &n, const std::string &ctx) {
  only_keys(n, {"coefficient", "exponent"}, ctx);
  PowerLaw p;
  opt(n, "coefficient", p.coefficient);
  opt(n, "exponent", p.exponent);
  return p;
}

ComplexPowerLaw complex_power_law(const YAML::Node &n, const std::string &ctx) {
  only_keys(n, {"coefficient", "exponent"}, ctx);
  ComplexPowerLaw p;
  if (const auto c = n["coefficient"])
    p.coefficient = complex_value(c, "coefficient");
  opt(n, "exponent", p.exponent);
  return p;
}

FamilyKind family_kind(const YAML::Node &n) {
  const auto s = get<std::string>(n, "kind");
  if (s == "constant-k")
    return FamilyKind::ConstantK;
  if (s == "example61")
    return FamilyKind::Example61;
  if (s == "shells")
    return FamilyKind::Shells;
  if (s == "slabs")
    return FamilyKind::Slabs;
  if (s == "tabulated")
    return FamilyKind::Tabulated;
  fail(n, "unknown family '" + s + "' (constant-k, example61, shells, slabs, tabulated)");
}

std::string_view family_name(FamilyKind k) {
  switch (k) {
  case FamilyKind::ConstantK:
    return "constant-k";
  case FamilyKind::Example61:
    return "example61";
  case FamilyKind::Shells:
    return "shells";
  case FamilyKind::Slabs:
    return "slabs";
  case FamilyKind::Tabulated:
    return "tabulated";
  }
  return "?";
}

FamilySpec parse_family(const YAML::Node &n) {
  if (!n.IsMap() || !n["kind"])
    fail(n, "family must be a table with a 'kind'");
  FamilySpec f;
  f.kind = family_kind(n["kind"]);
  std::set<std::string> keys{"kind", "epsilon", "long_range", "short_range"};
  switch (f.kind) {
  case FamilyKind::ConstantK:
    keys = {"kind", "k", "epsilon"};
    break;
  case FamilyKind::Example61:
    keys.insert({"lambda", "m0"});
    break;
  case FamilyKind::Shells:
  case FamilyKind::Slabs:
    keys.insert({"lambda", "interfaces", "nu"});
    break;
  case FamilyKind::Tabulated:
    keys.insert({"radii", "values"});
    break;
  }
  only_keys(n, keys, "family");
  opt(n, "k", f.k);
  opt(n, "lambda", f.lambda);
  opt(n, "epsilon", f.epsilon);
  if (const auto m = n["m0"])
    f.m0 = get<double>(m, "m0");
  if (const auto x = n["long_range"])
    f.long_range = power_law(x, "long_range");
  if (const auto x = n["short_range"])
    f.short_range = complex_power_law(x, "short_range");
  if (const auto x = n["interfaces"])
    f.interfaces = doubles(x, "interfaces");
  if (const auto x = n["nu"])
    f.nu = doubles(x, "nu");
  if (const auto x = n["radii"])
    f.profile.radii = doubles(x, "radii");
  if (const auto x = n["values"])
    f.profile.values = doubles(x, "values");
  return f;
}

GaugeSpec parse_gauges(const YAML::Node &n) {
  GaugeSpec g;
  if (n.IsScalar()) {
    const auto s = get<std::string>(n, "gauges");
    if (s == "kato")
      g.kind = GaugeSpec::Kind::Kato;
    else if (s == "power")
      g.kind = GaugeSpec::Kind::Power;
    else if (s == "family")
      g.kind = GaugeSpec::Kind::Family;
    else
      fail(n, "unknown gauges '" + s + "' (family, power, kato)");
    return g;
  }
  only_keys(n, {"h", "epsilon"}, "gauges");
  if (const auto h = n["h"])
    g = parse_gauges(h);
  opt(n, "epsilon", g.epsilon);
  return g;
}

InitialSpec parse_initial(const YAML::Node &n) {
  InitialSpec init;
  if (n.IsScalar()) {
    const auto s = get<std::string>(n, "initial");
    if (s == "unit")
      init.kind = InitialSpec::Kind::Unit;
    else if (s == "random")
      init.kind = InitialSpec::Kind::Random;
    else
      fail(n, "unknown initial data '" + s + "' (unit, random, or a table with v and dv)");
    return init;
  }
  only_keys(n, {"v", "dv"}, "initial");
  if (!n["v"] || !n["dv"])
    fail(n, "explicit initial data needs both v and dv");
  init.kind = InitialSpec::Kind::Explicit;
  init.v = complexes(n["v"], "v");
  init.dv = complexes(n["dv"], "dv");
  return init;
}

std::size_t mode_count(int N, int L) { return N == 2 ? std::size_t(2 * L + 1) : std::size_t((L + 1) * (L + 1)); }

const std::set<std::string> &known_checks() {
  static const std::set<std::string> s{std::string(checks::audit),    std::string(checks::monotone_Mplus),
                                       std::string(checks::r2N),      std::string(checks::classify),
                                       std::string(checks::dichotomy), std::string(checks::prop43),
                                       std::string(checks::lemma_a)};
  return s;
}

void require(bool ok, const std::string &what) {
  if (!ok)
    throw ConfigError(what);
}

} // namespace

void Scenario::validate() const {
  require(!name.empty(), "name must not be empty");
  require(dimension == 2 || dimension == 3, "dimension must be 2 or 3");
  require(cutoff >= 0 && cutoff <= 16, "cutoff must lie in [0, 16]");
  require(angular_degree == -1 || angular_degree >= 2 * cutoff, "angular_degree must be at least 2 * cutoff");
  require(inner_radius > 0.0, "inner_radius must be positive");
  require(r_start > inner_radius, "window must start beyond inner_radius");
  require(r_end > r_start, "window must be increasing");
  require(grid >= 2, "grid must be at least 2");
  require(tolerance > 0.0 && tolerance <= 1e-3, "tolerance must lie in (0, 1e-3]");
  require(slack >= 0.0, "slack must be nonnegative");
  require(m > 0.0, "m must be positive");
  require(lemma_instances > 0 && lemma_constructed > 0, "lemma_a counts must be positive");
  require(family.epsilon > 0.0 && family.epsilon < 2.0, "family epsilon must lie in (0, 2)");
  if (gauges.kind == GaugeSpec::Kind::Power)
    require(gauges.epsilon > 0.0 && gauges.epsilon < 2.0, "gauges epsilon must lie in (0, 2)");
  switch (family.kind) {
  case FamilyKind::ConstantK:
    require(family.k > 0.0, "family k must be positive");
    break;
  case FamilyKind::Example61:
    require(family.lambda > 0.0, "family lambda must be positive");
    require(!family.m0 || (*family.m0 > 0.0 && *family.m0 <= family.lambda), "family m0 must lie in (0, lambda]");
    break;
  case FamilyKind::Shells:
  case FamilyKind::Slabs:
    require(family.lambda > 0.0, "family lambda must be positive");
    require(family.nu.size() == family.interfaces.size() + 1, "family needs one more nu than interfaces");
    for (double v : family.nu)
      require(v > 0.0, "family nu must be positive");
    break;
  case FamilyKind::Tabulated:
    try {
      family.profile.validate();
    } catch (const Error &e) {
      throw ConfigError(std::string("family profile: ") + e.what());
    }
    for (double v : family.profile.values)
      require(v > 0.0, "tabulated lambda must be positive");
    break;
  }
  require(!checks.empty(), "checks must not be empty");
  for (const auto &c : checks)
    require(known_checks().count(c) > 0, "unknown check '" + c + "'");
  if (initial.kind == InitialSpec::Kind::Explicit) {
    const auto n = mode_count(dimension, cutoff);
    require(initial.v.size() == n && initial.dv.size() == n,
            "explicit initial data needs " + std::to_string(n) + " entries in v and dv");
    bool nonzero = false;
    for (std::size_t i = 0; i < n; ++i)
      nonzero = nonzero || initial.v[i] != 0.0 || initial.dv[i] != 0.0;
    require(nonzero, "initial data must not vanish");
  }
}

bool Scenario::wants(std::string_view check) const {
  return std::find(checks.begin(), checks.end(), check) != checks.end();
}

std::vector<double> Scenario::grid_radii() const {
  std::vector<double> g;
  for (int i = 1; i <= grid; ++i)
    g.push_back(i == grid ? r_end : r_start + (r_end - r_start) * i / grid);
  return g;
}

std::string Scenario::canonical() const {
  std::ostringstream o;
  auto list = [&](const std::vector<double> &v) {
    o << '[';
    for (std::size_t i = 0; i < v.size(); ++i)
      o << (i ? "," : "") << fmt_double(v[i]);
    o << "]\n";
  };
  auto clist = [&](const std::vector<cplx> &v) {
    o << '[';
    for (std::size_t i = 0; i < v.size(); ++i)
      o << (i ? "," : "") << fmt_double(v[i].real()) << ':' << fmt_double(v[i].imag());
    o << "]\n";
  };
  o << "name=" << name << "\ndimension=" << dimension << "\ncutoff=" << cutoff << "\nangular_degree=" << angular_degree
    << "\nfamily=" << family_name(family.kind) << "\nk=" << fmt_double(family.k)
    << "\nlambda=" << fmt_double(family.lambda) << "\nepsilon=" << fmt_double(family.epsilon)
    << "\nm0=" << (family.m0 ? fmt_double(*family.m0) : "-") << "\nlong_range=" << fmt_double(family.long_range.coefficient)
    << ',' << fmt_double(family.long_range.exponent) << "\nshort_range=" << fmt_double(family.short_range.coefficient.real())
    << ':' << fmt_double(family.short_range.coefficient.imag()) << ',' << fmt_double(family.short_range.exponent)
    << "\ninterfaces=";
  list(family.interfaces);
  o << "nu=";
  list(family.nu);
  o << "radii=";
  list(family.profile.radii);
  o << "values=";
  list(family.profile.values);
  o << "gauges=" << int(gauges.kind) << ',' << fmt_double(gauges.epsilon) << "\ninner_radius=" << fmt_double(inner_radius)
    << "\nwindow=" << fmt_double(r_start) << ',' << fmt_double(r_end) << "\ngrid=" << grid
    << "\ntolerance=" << fmt_double(tolerance) << "\nseed=" << seed << "\nslack=" << fmt_double(slack)
    << "\ninitial=" << int(initial.kind) << "\nv=";
  clist(initial.v);
  o << "dv=";
  clist(initial.dv);
  o << "checks=";
  for (const auto &c : checks)
    o << c << ',';
  o << "\nm=" << fmt_double(m) << "\nlemma_a=" << lemma_instances << ',' << lemma_constructed << '\n';
  return o.str();
}

Scenario parse_scenario(const std::string &text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception &e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap())
    throw ConfigError("scenario must be a table of keys");
  only_keys(root,
            {"name", "dimension", "cutoff", "angular_degree", "family", "gauges", "inner_radius", "window", "grid",
             "tolerance", "seed", "slack", "initial", "checks", "m", "lemma_a"},
            "scenario");
  Scenario s;
  opt(root, "name", s.name);
  opt(root, "dimension", s.dimension);
  opt(root, "cutoff", s.cutoff);
  opt(root, "angular_degree", s.angular_degree);
  if (const auto f = root["family"])
    s.family = parse_family(f);
  if (const auto g = root["gauges"])
    s.gauges = parse_gauges(g);
  opt(root, "inner_radius", s.inner_radius);
  if (const auto w = root["window"]) {
    const auto v = doubles(w, "window");
    if (v.size() != 2)
      fail(w, "window is [r_start, r_end]");
    s.r_start = v[0];
    s.r_end = v[1];
  }
  opt(root, "grid", s.grid);
  opt(root, "tolerance", s.tolerance);
  opt(root, "seed", s.seed);
  opt(root, "slack", s.slack);
  if (const auto i = root["initial"])
    s.initial = parse_initial(i);
  if (const auto c = root["checks"]) {
    if (!c.IsSequence())
      fail(c, "checks must be a list");
    s.checks.clear();
    for (const auto &x : c) {
      const auto name = get<std::string>(x, "checks");
      if (!known_checks().count(name))
        fail(x, "unknown check '" + name + "'");
      s.checks.push_back(name);
    }
  }
  opt(root, "m", s.m);
  if (const auto l = root["lemma_a"]) {
    only_keys(l, {"instances", "constructed"}, "lemma_a");
    opt(l, "instances", s.lemma_instances);
    opt(l, "constructed", s.lemma_constructed);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError &e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

FieldAndGauges build_family(const Scenario &s) {
  const auto &f = s.family;
  FieldAndGauges fg;
  auto potential = [&](PotentialModel m) {
    m.inner_radius = s.inner_radius;
    m.epsilon = f.epsilon;
    m.long_range = f.long_range;
    m.short_range = f.short_range;
    m.label = s.name;
    return build_example61(m);
  };
  switch (f.kind) {
  case FamilyKind::ConstantK:
    fg = potential(PotentialModel::constant(s.dimension, f.k * f.k));
    break;
  case FamilyKind::Example61: {
    auto m = PotentialModel::constant(s.dimension, f.lambda);
    m.m0 = f.m0.value_or(f.lambda);
    fg = potential(m);
    break;
  }
  case FamilyKind::Tabulated:
    fg = potential(PotentialModel::tabulated(s.dimension, f.profile));
    break;
  case FamilyKind::Shells:
  case FamilyKind::Slabs: {
    LayeredMedium med;
    med.geometry = f.kind == FamilyKind::Shells ? LayeredMedium::Geometry::Shells : LayeredMedium::Geometry::Slabs;
    med.dimension = s.dimension;
    med.interfaces = f.interfaces;
    med.nu = f.nu;
    med.lambda = f.lambda;
    med.inner_radius = s.inner_radius;
    med.epsilon = f.epsilon;
    med.mu_long = f.long_range;
    med.mu_short = f.short_range;
    try {
      fg = build_example62(med);
    } catch (const InvalidArgument &e) {
      throw ConfigError(std::string("family: ") + e.what());
    }
    fg.field.label = s.name;
    break;
  }
  }
  switch (s.gauges.kind) {
  case GaugeSpec::Kind::Family:
    break;
  case GaugeSpec::Kind::Power:
    fg.gauges = RadialGauges::power(s.gauges.epsilon);
    break;
  case GaugeSpec::Kind::Kato:
    fg.gauges = RadialGauges::kato();
    break;
  }
  return fg;
}

const std::vector<Scenario> &scenario_catalog() {
  static const std::vector<Scenario> cat = [] {
    std::vector<Scenario> out;
    const std::vector<std::string> all{std::string(checks::audit), std::string(checks::monotone_Mplus),
                                       std::string(checks::r2N), std::string(checks::classify),
                                       std::string(checks::dichotomy)};
    Scenario kato;
    kato.name = "kato";
    kato.family.kind = FamilyKind::ConstantK;
    kato.r_end = 50.0;
    kato.grid = 490;
    kato.checks = all;
    out.push_back(kato);

    Scenario e61 = kato;
    e61.name = "example61";
    e61.cutoff = 2;
    e61.family.kind = FamilyKind::Example61;
    e61.family.long_range = {1.0, 0.5};
    e61.family.short_range = {cplx(0.0, 1.0), 1.5};
    e61.initial.kind = InitialSpec::Kind::Random;
    out.push_back(e61);

    Scenario two = kato;
    two.name = "two-shell";
    two.cutoff = 2;
    two.family.kind = FamilyKind::Shells;
    two.family.interfaces = {2.0};
    two.family.nu = {1.0, 4.0};
    two.r_end = 40.0;
    two.grid = 390;
    two.initial.kind = InitialSpec::Kind::Random;
    out.push_back(two);

    Scenario four = two;
    four.name = "four-shell";
    four.family.interfaces = {2.0, 3.0, 5.0};
    four.family.nu = {1.0, 1.5, 2.5, 4.0};
    out.push_back(four);

    Scenario slabs = two;
    slabs.name = "slabs";
    slabs.cutoff = 4;
    slabs.family.kind = FamilyKind::Slabs;
    slabs.family.interfaces = {-2.0, -1.0, 1.0, 2.0};
    slabs.family.nu = {4.0, 2.0, 1.0, 2.0, 4.0};
    slabs.r_end = 30.0;
    slabs.grid = 290;
    out.push_back(slabs);
    for (const auto &s : out)
      s.validate();
    return out;
  }();
  return cat;
}

} // namespace kgc
