#pragma once

#include "logfol/logfol.hpp"
#include "logfol/report.hpp"
#include "logfol/scene.hpp"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace logfol::cli {

using nlohmann::json;

struct Options {
  std::optional<int> order;  ///< overrides the scene's truncation order
};

inline constexpr int kDefaultOrder = 6;

inline std::string str(const Rational& q) { return q.get_str(); }

inline json str_vector(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(str(x));
  return out;
}

inline json str_matrix(const QMatrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(str(m(i, j)));
    out.push_back(row);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

inline std::string vector_text(const std::vector<Rational>& v) {
  std::vector<std::string> parts;
  for (const auto& x : v) parts.push_back(str(x));
  return "(" + join(parts, ", ") + ")";
}

/// Scene reading helpers shared by the commands.
class SceneReader {
public:
  SceneReader(const Scene& scene, const Options& opts) : scene_(scene), opts_(opts) {}

  const Scene& scene() const { return scene_; }

  GermContext germ() const {
    const auto& s = scene_.section("germ");
    const long n = scene_.get_int(scene_.entry(s, "n"));
    const long r = scene_.get_int(scene_.entry(s, "r"));
    long order = kDefaultOrder;
    if (const auto* e = s.find("order")) order = scene_.get_int(*e);
    if (opts_.order) order = *opts_.order;
    std::vector<std::string> names;
    if (const auto* e = s.find("vars")) {
      std::stringstream ss(e->value);
      std::string name;
      while (std::getline(ss, name, ',')) {
        name = detail::trim(name);
        if (name.empty()) scene_.fail(*e, "empty variable name");
        names.push_back(name);
      }
      if (static_cast<long>(names.size()) != n)
        scene_.fail(*e, "expected " + std::to_string(n) + " variable names, found " + std::to_string(names.size()));
    }
    try {
      return GermContext(static_cast<int>(n), static_cast<int>(r), static_cast<int>(order), names);
    } catch (const DomainError& err) {
      throw SceneError(scene_.source, s.line, 1, err.what());
    }
  }

  Parameters params() const {
    Parameters p;
    if (const auto* s = scene_.optional_section("params"))
      for (const auto& e : s->entries) p[e.key] = scene_.get_rational(e);
    return p;
  }

  /// Expressions of an entry, parsed as functions or vector fields in `ctx`.
  std::vector<Jet> jets(const SceneEntry& e, const GermContext& ctx, const Parameters& p) const {
    std::vector<Jet> out;
    for (const auto& [text, offset] : scene_.get_expressions(e))
      out.push_back(with_location(e, offset, [&] { return ExpressionParser(ctx, p).parse_jet(text); }));
    return out;
  }

  Jet jet(const SceneEntry& e, const GermContext& ctx, const Parameters& p) const {
    const auto all = jets(e, ctx, p);
    if (all.size() != 1) scene_.fail(e, "expected a single expression");
    return all.front();
  }

  std::vector<LogDerivation> fields(const SceneEntry& e, const GermContext& ctx, const Parameters& p) const {
    std::vector<LogDerivation> out;
    for (const auto& [text, offset] : scene_.get_expressions(e))
      out.push_back(with_location(e, offset, [&] {
        ExpressionParser parser(ctx, p);
        return LogDerivation::from_ordinary(ctx, parser.parse_field(text));
      }));
    if (out.empty()) scene_.fail(e, "expected at least one vector field");
    return out;
  }

  /// A scalar given as a rational or an expression in the parameters.
  Rational scalar(const SceneEntry& e, const Parameters& p) const {
    const GermContext point(0, 0, 1, {}, false);
    const Jet j = with_location(e, 0, [&] { return ExpressionParser(point, p).parse_jet(e.value); });
    return j.constant_term();
  }

  std::vector<long> ints(const SceneEntry& e) const {
    const auto j = scene_.get_json(e);
    if (!j.is_array()) scene_.fail(e, "expected a list of integers");
    std::vector<long> out;
    for (const auto& x : j) {
      if (!x.is_number_integer()) scene_.fail(e, "expected integers, found " + x.dump());
      out.push_back(x.get<long>());
    }
    return out;
  }

  std::vector<Rational> rationals(const SceneEntry& e) const { return scene_.json_rationals(e, scene_.get_json(e)); }

  QMatrix matrix(const SceneEntry& e, const json& j, std::size_t rows, std::size_t cols) const {
    if (j.is_number_integer() && j.get<long>() == 0) return QMatrix(rows, cols);
    if (j.is_array() && j.empty() && (rows == 0 || cols == 0)) return QMatrix(rows, cols);
    const auto m = scene_.json_matrix(e, j);
    if (m.size() != rows || (rows > 0 && m.front().size() != cols))
      scene_.fail(e, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, found " + j.dump());
    return QMatrix::from_rows(m, cols);
  }

  QMatrix matrix(const SceneEntry& e) const {
    const auto j = scene_.get_json(e);
    const auto m = scene_.json_matrix(e, j);
    return QMatrix::from_rows(m, m.empty() ? 0 : m.front().size());
  }

private:
  template <class F>
  auto with_location(const SceneEntry& e, std::size_t offset, F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError& err) {
      std::string what = err.what();
      what = what.substr(0, what.rfind(" (column "));
      scene_.fail(e, what, offset + err.column() - 1);
    } catch (const DomainError& err) {
      scene_.fail(e, err.what(), offset);
    }
  }

  const Scene& scene_;
  const Options& opts_;
};

inline int section_index(const Scene& scene, const SceneSection& s, std::size_t pos, long bound) {
  std::stringstream ss(s.label);
  std::vector<long> idx;
  long v;
  while (ss >> v) idx.push_back(v);
  if (idx.size() <= pos || idx[pos] < 1 || idx[pos] > bound)
    throw SceneError(scene.source, s.line, 1, "section [" + s.kind + " " + s.label + "] needs 1-based indices in 1.." + std::to_string(bound));
  return static_cast<int>(idx[pos] - 1);
}

// ---- semistable check ------------------------------------------------------

inline Report semistable_check(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const auto ctx = in.germ();
  const auto p = in.params();
  const auto& fs = scene.section("foliation");
  const auto gens = in.fields(scene.entry(fs, "generators"), ctx, p);
  long rank = static_cast<long>(gens.size());
  if (const auto* e = fs.find("rank")) rank = scene.get_int(*e);
  Report rep;
  const FoliationGerm f(ctx, gens, static_cast<int>(rank));
  const auto inv = involutivity_check(f, ctx.order());
  if (inv.decision == Decision::Negative) {
    rep.decision = Outcome::InputError;
    rep.order = inv.decided_at_order;
    rep.summary.push_back("inconsistent scene: generators " + std::to_string(inv.failing_pair->first + 1) + " and " +
                          std::to_string(inv.failing_pair->second + 1) + " do not bracket into the foliation");
    return rep;
  }
  const auto res = find_flat_unit(f, ctx.order());
  rep.decision = to_outcome(res.decision);
  rep.order = res.decided_at_order;
  if (res.flat_unit) {
    rep.witnesses["flat_unit"] = res.flat_unit->to_string();
    rep.witnesses["unique"] = res.unique;
    rep.summary.push_back("witness g=" + res.flat_unit->to_string());
    if (!res.unique) rep.summary.push_back("flat unit not unique; free coefficients set to 0");
  }
  if (res.failing_degree) {
    rep.witnesses["failing_degree"] = *res.failing_degree;
    rep.summary.push_back("no flat unit: the degree " + std::to_string(*res.failing_degree) + " system is inconsistent");
  }
  if (!res.note.empty()) rep.witnesses["note"] = res.note;
  const auto degenerate = f.degenerate_generators();
  if (!degenerate.empty()) {
    std::vector<std::string> idx;
    for (auto k : degenerate) idx.push_back(std::to_string(k + 1));
    rep.witnesses["degenerate_generators"] = idx;
    rep.summary.push_back("generators vanishing at the origin: " + join(idx, ", "));
  }
  return rep;
}

// ---- cs paper / cs surface ---------------------------------------------------

inline Report cs_paper(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const auto ctx = in.germ();
  const auto p = in.params();
  const auto* cs = scene.optional_section("cs");
  std::string form_name;
  if (cs)
    if (const auto* e = cs->find("form")) form_name = e->value;
  const auto& fs = scene.section("log_form", form_name);
  const auto dlog = in.jets(scene.entry(fs, "dlog"), ctx, p);
  std::vector<Jet> regular;
  if (const auto* e = fs.find("regular")) regular = in.jets(*e, ctx, p);
  if (static_cast<int>(dlog.size()) != ctx.r()) scene.fail(scene.entry(fs, "dlog"), "expected r = " + std::to_string(ctx.r()) + " dlog coefficients");
  if (regular.empty())
    for (int k = ctx.r(); k < ctx.n(); ++k) regular.push_back(Jet(ctx));
  if (static_cast<int>(regular.size()) != ctx.n() - ctx.r())
    scene.fail(*fs.find("regular"), "expected n - r = " + std::to_string(ctx.n() - ctx.r()) + " regular coefficients");
  const LogOneForm w(ctx, dlog, regular);

  std::vector<std::pair<int, int>> pairs;
  if (cs && cs->find("i")) {
    const int i = static_cast<int>(scene.get_int(scene.entry(*cs, "i"))) - 1;
    const int j = static_cast<int>(scene.get_int(scene.entry(*cs, "j"))) - 1;
    pairs = {{i, j}};
  } else {
    for (int i = 0; i < ctx.r(); ++i)
      for (int j = i + 1; j < ctx.r(); ++j) pairs.push_back({i, j});
  }
  Report rep;
  rep.order = ctx.order();
  rep.decision = Outcome::Positive;
  json values = json::array();
  for (const auto& [i, j] : pairs) {
    const auto a = cs_index_paper(w, i, j), b = cs_index_paper(w, j, i);
    const Rational total = a.value + b.value;
    const bool holds = total == ctx.r() - 2;
    if (!holds) rep.decision = Outcome::Negative;
    values.push_back({{"i", i + 1}, {"j", j + 1}, {"cs_ij", str(a.value)}, {"cs_ji", str(b.value)}, {"sum", str(total)},
                      {"dlog_part_ij", str(a.dlog_part)}, {"regular_part_ij", str(a.regular_part)}});
    rep.summary.push_back("CS(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " + str(a.value) + ", CS(" +
                          std::to_string(j + 1) + "," + std::to_string(i + 1) + ") = " + str(b.value) + ", sum " + str(total) +
                          (holds ? " = r-2" : " != r-2 = " + std::to_string(ctx.r() - 2)));
  }
  rep.witnesses["indices"] = values;
  rep.witnesses["r_minus_2"] = ctx.r() - 2;
  return rep;
}

inline SurfaceOneForm read_surface_form(const SceneReader& in, const SceneSection& s, const GermContext& ctx, const Parameters& p) {
  const auto& scene = in.scene();
  return SurfaceOneForm(in.jet(scene.entry(s, "A"), ctx, p), in.jet(scene.entry(s, "B"), ctx, p));
}

inline Report cs_surface(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const auto ctx = in.germ();
  if (ctx.n() != 2 || ctx.r() != 0) throw SceneError(scene.source, scene.section("germ").line, 1, "cs surface needs a smooth surface germ (n = 2, r = 0)");
  const auto p = in.params();
  const auto forms = scene.all("surface_form");
  if (forms.empty() || forms.size() > 2) throw SceneError(scene.source, 1, 1, "cs surface needs one or two [surface_form] sections");
  Report rep;
  rep.order = ctx.order();
  rep.decision = Outcome::Positive;
  std::vector<SurfaceOneForm> ws;
  std::vector<Rational> cs;
  json list = json::array();
  for (const auto* s : forms) {
    ws.push_back(read_surface_form(in, *s, ctx, p));
    cs.push_back(cs_index_surface(ws.back()));
    const auto z = vanishing_divisor(ws.back());
    const std::string name = s->label.empty() ? std::to_string(list.size() + 1) : s->label;
    list.push_back({{"name", name}, {"cs", str(cs.back())}, {"vanishing_order", z.order}});
    rep.summary.push_back("CS(" + name + ") = " + str(cs.back()) + ", Z(F,Y) has order " + std::to_string(z.order));
  }
  rep.witnesses["forms"] = list;
  if (ws.size() == 2) {
    const Rational sum = cs[0] + cs[1];
    const bool common = common_generator_exists(ws[0], ws[1]);
    rep.witnesses["sum"] = str(sum);
    rep.witnesses["common_generator"] = common;
    rep.decision = sum == 0 ? Outcome::Positive : Outcome::Negative;
    rep.summary.push_back("sum of indices " + str(sum) + (sum == 0 ? " (vanishes)" : " (does not vanish)"));
    rep.summary.push_back(std::string("common local generator along Y: ") + (common ? "yes" : "no"));
  }
  return rep;
}

// ---- pushout check -----------------------------------------------------------

inline Report pushout_check(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const auto p = in.params();
  Report rep;
  rep.decision = Outcome::Positive;
  SNCGlueData glue;
  const auto doubles = scene.all("double_stratum");
  const auto comps = scene.all("component");
  std::optional<GermContext> ctx;
  std::vector<FoliationGerm> foliations;
  if (!comps.empty()) {
    ctx = in.germ();
    rep.order = ctx->order();
    std::vector<std::optional<FoliationGerm>> by_index(static_cast<std::size_t>(ctx->r()));
    for (const auto* s : comps) {
      const int i = section_index(scene, *s, 0, ctx->r());
      const auto cctx = ctx->component(i);
      const auto gens = in.fields(scene.entry(*s, "generators"), cctx, p);
      long rank = static_cast<long>(gens.size());
      if (const auto* e = s->find("rank")) rank = scene.get_int(*e);
      by_index[static_cast<std::size_t>(i)] = FoliationGerm(cctx, gens, static_cast<int>(rank));
    }
    for (int i = 0; i < ctx->r(); ++i) {
      if (!by_index[static_cast<std::size_t>(i)]) throw SceneError(scene.source, 1, 1, "missing [component " + std::to_string(i + 1) + "]");
      foliations.push_back(*by_index[static_cast<std::size_t>(i)]);
    }
  }
  if (!doubles.empty()) {
    long components = 0;
    if (const auto* s = scene.optional_section("pushout"))
      if (const auto* e = s->find("components")) components = scene.get_int(*e);
    if (ctx) components = ctx->r();
    if (components < 2) throw SceneError(scene.source, 1, 1, "set 'components' in [pushout] to the number of components");
    glue.components = static_cast<int>(components);
    for (const auto* s : doubles)
      glue.double_strata.push_back({section_index(scene, *s, 0, components), section_index(scene, *s, 1, components),
                                    in.scalar(scene.entry(*s, "scalar"), p)});
    for (const auto* s : scene.all("triple_stratum"))
      glue.triple_strata.push_back({section_index(scene, *s, 0, components), section_index(scene, *s, 1, components),
                                    section_index(scene, *s, 2, components)});
  } else if (ctx) {
    bool rank_one = true;
    for (const auto& f : foliations) rank_one = rank_one && f.generators().size() == 1;
    if (rank_one) {
      std::vector<LogDerivation> gens;
      for (const auto& f : foliations) gens.push_back(f.generators().front());
      glue = glue_data_from_generators(*ctx, gens);
    }
  } else {
    throw SceneError(scene.source, 1, 1, "pushout check needs [double_stratum] or [component] sections");
  }

  if (glue.components > 0) {
    const auto check = check_gluing_cocycle(glue);
    json strata = json::array();
    for (const auto& d : glue.double_strata) strata.push_back({{"i", d.i + 1}, {"j", d.j + 1}, {"scalar", str(d.scalar)}});
    rep.witnesses["double_strata"] = strata;
    rep.witnesses["triple_products"] = str_vector(check.products);
    for (const auto& d : glue.double_strata)
      rep.summary.push_back("phi(" + std::to_string(d.i + 1) + "," + std::to_string(d.j + 1) + ") = " + str(d.scalar));
    if (!check.holds) {
      rep.decision = Outcome::Negative;
      json certs = json::array();
      for (const auto& fail : check.failures) {
        const std::string cert = "triple (" + std::to_string(fail.triple.i + 1) + "," + std::to_string(fail.triple.j + 1) + "," +
                                 std::to_string(fail.triple.k + 1) + "): product " + str(fail.product) + " ≠ 1";
        certs.push_back(cert);
        rep.summary.push_back(cert);
      }
      rep.witnesses["certificates"] = certs;
      return rep;
    }
    rep.summary.push_back("cocycle condition holds on all " + std::to_string(glue.triple_strata.size()) + " triple strata");
  }

  if (const auto* s = scene.optional_section("pushout"); s && s->find("field")) {
    if (!ctx) scene.fail(*s->find("field"), "membership needs [germ] and [component] sections");
    const auto v = in.fields(*s->find("field"), *ctx, p);
    const auto res = pushout_membership(v.front(), foliations, ctx->order());
    rep.decision = to_outcome(res.decision);
    rep.order = res.decided_at_order;
    rep.witnesses["field_member"] = to_string(res.decision);
    if (res.failing_component) {
      rep.witnesses["failing_component"] = *res.failing_component + 1;
      rep.summary.push_back("field leaves the foliation on component " + std::to_string(*res.failing_component + 1));
    } else {
      rep.summary.push_back(std::string("field membership: ") + to_string(res.decision));
    }
  }
  return rep;
}

// ---- holonomy ------------------------------------------------------------------

inline Report holonomy(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const auto& s = scene.section("holonomy");
  const auto& e1 = scene.entry(s, "h1");
  const auto& e2 = scene.entry(s, "h2");
  std::optional<HolonomyData> h1, h2;
  try {
    h1.emplace(in.rationals(e1));
  } catch (const DomainError& err) {
    scene.fail(e1, err.what());
  }
  try {
    h2.emplace(in.rationals(e2));
  } catch (const DomainError& err) {
    scene.fail(e2, err.what());
  }
  if (h1->values.size() != h2->values.size()) scene.fail(e2, "h1 and h2 need the same number of generators");
  const auto check = check_holonomy_compatibility(*h1, *h2);
  Report rep;
  rep.decision = check.compatible ? Outcome::Positive : Outcome::Negative;
  rep.witnesses["products"] = str_vector(check.products);
  rep.summary.push_back("h1 * h2 per generator: " + vector_text(check.products));
  for (std::size_t k = 0; k < check.products.size(); ++k)
    if (check.products[k] != 1) rep.summary.push_back("generator " + std::to_string(k + 1) + ": h1 * h2 = " + str(check.products[k]) + " ≠ 1");
  if (const auto* e = s.find("degrees")) {
    const auto d = in.ints(*e);
    if (d.size() != 2) scene.fail(*e, "expected the two normal degrees [d1, d2]");
    const bool ok = check_normal_degrees(d[0], d[1]);
    rep.witnesses["normal_degrees_opposite"] = ok;
    rep.summary.push_back("normal degrees " + std::to_string(d[0]) + " + " + std::to_string(d[1]) + (ok ? " = 0" : " ≠ 0"));
    if (!ok) rep.decision = Outcome::Negative;
  }
  return rep;
}

// ---- monoid --------------------------------------------------------------------

inline FGMonoid read_monoid(const SceneReader& in, EnumerationBounds& bounds, SaturationLattice& lattice) {
  const auto& scene = in.scene();
  const auto& s = scene.section("monoid");
  const long rank = scene.get_int(scene.entry(s, "rank"));
  const auto& ge = scene.entry(s, "generators");
  const auto j = scene.get_json(ge);
  if (!j.is_array()) scene.fail(ge, "expected a list of integer vectors");
  std::vector<LatticeVector> gens;
  for (const auto& g : j) {
    if (!g.is_array() || static_cast<long>(g.size()) != rank) scene.fail(ge, "each generator needs " + std::to_string(rank) + " integer entries");
    LatticeVector v;
    for (const auto& x : g) {
      if (!x.is_number_integer()) scene.fail(ge, "expected integer entries, found " + x.dump());
      v.push_back(x.get<std::int64_t>());
    }
    gens.push_back(v);
  }
  if (const auto* e = s.find("box")) bounds.box = scene.get_int(*e);
  if (const auto* e = s.find("padding")) bounds.max_multiple = scene.get_int(*e);
  lattice = SaturationLattice::Ambient;
  if (const auto* e = s.find("lattice")) {
    if (e->value == "groupification")
      lattice = SaturationLattice::Groupification;
    else if (e->value != "ambient")
      scene.fail(*e, "lattice must be 'ambient' or 'groupification'");
  }
  try {
    return FGMonoid(static_cast<std::size_t>(rank), gens);
  } catch (const DomainError& err) {
    scene.fail(ge, err.what());
  }
}

inline std::string lattice_text(const LatticeVector& v) {
  std::vector<std::string> parts;
  for (auto x : v) parts.push_back(std::to_string(x));
  return "(" + join(parts, ", ") + ")";
}

inline Report monoid_command(const Scene& scene, const Options& opts, bool check_only) {
  const SceneReader in(scene, opts);
  EnumerationBounds bounds;
  SaturationLattice lattice;
  const auto m = read_monoid(in, bounds, lattice);
  const auto sat = saturate_with_witnesses(m, lattice, bounds);
  const bool saturated = same_monoid(m, sat.monoid, bounds);
  Report rep;
  json gens = json::array();
  std::vector<std::string> text;
  for (const auto& w : sat.witnesses) {
    gens.push_back({{"vector", w.vector}, {"multiple", w.multiple}});
    text.push_back(lattice_text(w.vector) + (w.multiple > 1 ? " [" + std::to_string(w.multiple) + "x in M]" : ""));
  }
  rep.witnesses["saturation_generators"] = gens;
  rep.witnesses["saturated"] = saturated;
  rep.witnesses["lattice"] = lattice == SaturationLattice::Ambient ? "ambient" : "groupification";
  rep.witnesses["box"] = bounds.box;
  rep.witnesses["padding"] = bounds.max_multiple;
  rep.summary.push_back("saturation generated by " + join(text, ", "));
  rep.summary.push_back(saturated ? "the monoid is saturated" : "the monoid is not saturated");
  rep.decision = check_only && !saturated ? Outcome::Negative : Outcome::Positive;
  return rep;
}

// ---- cohomology ------------------------------------------------------------------

inline Report cohomology_p1(long degree) {
  const long w = stable_window(degree);
  const auto h = P1CechWindow(degree, w).dimensions();
  Report rep;
  rep.decision = Outcome::Positive;
  rep.witnesses = {{"degree", degree}, {"h0", h.h0}, {"h1", h.h1}, {"window", w}};
  rep.summary.push_back("O(" + std::to_string(degree) + ") on P^1: h0=" + std::to_string(h.h0) + " h1=" + std::to_string(h.h1));
  rep.summary.push_back("monomial window stabilized at width " + std::to_string(w));
  return rep;
}

inline Report cohomology_snc_curve(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const auto& s = scene.section("bundle");
  const auto left = in.ints(scene.entry(s, "left"));
  std::vector<long> right = left;
  if (const auto* e = s.find("right")) right = in.ints(*e);
  QMatrix glue = QMatrix::identity(left.size());
  if (const auto* e = s.find("glue")) glue = in.matrix(*e, scene.get_json(*e), left.size(), left.size());
  std::optional<SNCCurveBundle> bundle;
  try {
    bundle.emplace(GradedBundleP1{left}, GradedBundleP1{right}, glue);
  } catch (const DomainError& err) {
    throw SceneError(scene.source, s.line, 1, std::string("inconsistent bundle: ") + err.what());
  }
  const auto h = logfol::cohomology_snc_curve(*bundle);
  const auto dual = bundle->serre_dual();
  const auto hd = logfol::cohomology_snc_curve(dual);
  Report rep;
  rep.decision = Outcome::Positive;
  rep.witnesses = {{"h0", h.h0}, {"h1", h.h1}, {"dual_h0", hd.h0}, {"dual_h1", hd.h1},
                   {"dual_left", dual.left.degrees}, {"dual_right", dual.right.degrees}, {"dual_glue", str_matrix(dual.glue)}};
  rep.summary.push_back("h0=" + std::to_string(h.h0) + " h1=" + std::to_string(h.h1));
  rep.summary.push_back("Serre dual: h0=" + std::to_string(hd.h0) + " h1=" + std::to_string(hd.h1));
  const bool dual_ok = hd.h0 == h.h1 && hd.h1 == h.h0;
  rep.witnesses["duality_consistent"] = dual_ok;
  if (!dual_ok) {
    rep.decision = Outcome::Negative;
    rep.summary.push_back("dimensions violate Serre duality");
  }
  return rep;
}

// ---- leaf complex / obstruction ------------------------------------------------------

inline Simplex read_simplex(const Scene& scene, const SceneEntry& e, const json& j, std::size_t opens) {
  if (!j.is_array() || j.empty()) scene.fail(e, "expected a simplex (nonempty list of open indices), found " + j.dump());
  Simplex s;
  for (const auto& x : j) {
    if (!x.is_number_unsigned() || x.get<std::size_t>() >= opens) scene.fail(e, "open index out of range in " + j.dump());
    s.push_back(x.get<std::size_t>());
  }
  return s;
}

/// Cover data from a [cech] section: either the P^1 builder (`degree`, optional
/// `target` and `multiplier`, `window`) or an explicit `data` JSON object.
inline CechLeafData read_cech(const SceneReader& in) {
  const auto& scene = in.scene();
  const auto& s = scene.section("cech");
  if (const auto* e = s.find("degree")) {
    const long d = scene.get_int(*e);
    std::optional<long> target;
    QVector mult;
    if (const auto* t = s.find("target")) target = scene.get_int(*t);
    if (const auto* m = s.find("multiplier")) mult = in.rationals(*m);
    long w = 0;
    if (const auto* we = s.find("window")) w = scene.get_int(*we);
    try {
      if (!s.find("window")) {
        // pick the window at which the hypercohomology is stable
        auto prev = leaf_complex_hypercohomology(p1_leaf_data(d, target, mult, w));
        int unchanged = 0;
        while (unchanged < 2) {
          ++w;
          const auto cur = leaf_complex_hypercohomology(p1_leaf_data(d, target, mult, w));
          unchanged = cur == prev ? unchanged + 1 : 0;
          prev = cur;
        }
      }
      return p1_leaf_data(d, target, mult, w);
    } catch (const DomainError& err) {
      scene.fail(*e, err.what());
    }
  }
  const auto& e = scene.entry(s, "data");
  const auto j = scene.get_json(e);
  try {
    const std::size_t opens = j.at("opens").get<std::size_t>();
    const std::size_t degrees = j.at("degrees").get<std::size_t>();
    CechLeafData data(opens, degrees);
    std::map<Simplex, std::vector<std::size_t>> dims;
    for (const auto& x : j.at("simplices")) {
      const Simplex sx = read_simplex(scene, e, x.at("simplex"), opens);
      auto d = x.at("dims").get<std::vector<std::size_t>>();
      if (d.size() != degrees) scene.fail(e, "simplex " + to_string(sx) + " needs one dimension per degree");
      dims[sx] = d;
      data.add_simplex(sx, d);
    }
    auto dim_of = [&](const Simplex& sx, std::size_t q) {
      const auto it = dims.find(sx);
      if (it == dims.end()) scene.fail(e, "unknown simplex " + to_string(sx));
      return it->second[q];
    };
    if (j.contains("restrictions"))
      for (const auto& x : j.at("restrictions")) {
        const Simplex face = read_simplex(scene, e, x.at("face"), opens), sx = read_simplex(scene, e, x.at("simplex"), opens);
        const auto& maps = x.at("maps");
        if (!maps.is_array() || maps.size() != degrees) scene.fail(e, "restriction " + to_string(face) + "->" + to_string(sx) + " needs one map per degree");
        std::vector<QMatrix> per;
        for (std::size_t q = 0; q < degrees; ++q) per.push_back(in.matrix(e, maps[q], dim_of(sx, q), dim_of(face, q)));
        data.set_restriction(face, sx, per);
      }
    if (j.contains("differentials"))
      for (const auto& x : j.at("differentials")) {
        const Simplex sx = read_simplex(scene, e, x.at("simplex"), opens);
        const auto& maps = x.at("maps");
        if (!maps.is_array() || maps.size() + 1 != degrees) scene.fail(e, "differential on " + to_string(sx) + " needs degrees - 1 maps");
        std::vector<QMatrix> per;
        for (std::size_t q = 0; q + 1 < degrees; ++q) per.push_back(in.matrix(e, maps[q], dim_of(sx, q + 1), dim_of(sx, q)));
        data.set_differential(sx, per);
      }
    data.validate();
    return data;
  } catch (const json::exception& err) {
    scene.fail(e, std::string("malformed cover data: ") + err.what());
  } catch (const DomainError& err) {
    scene.fail(e, std::string("inconsistent cover data: ") + err.what());
  }
}

inline Report leaf_complex(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const DoubleComplex dc(read_cech(in));
  const auto h = leaf_complex_hypercohomology(dc);
  Report rep;
  rep.decision = Outcome::Positive;
  rep.witnesses = {{"H0", h.h0}, {"H1", h.h1}, {"H2", h.h2}, {"total_dims", {dc.total_dim(0), dc.total_dim(1), dc.total_dim(2)}}};
  rep.summary.push_back("hypercohomology dims: H0=" + std::to_string(h.h0) + " H1=" + std::to_string(h.h1) + " H2=" + std::to_string(h.h2));
  return rep;
}

inline Report obstruction_verify(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const DoubleComplex dc(read_cech(in));
  const auto& s = scene.section("cochains");
  ObstructionTriple t;
  t.theta = in.rationals(scene.entry(s, "theta"));
  t.g = in.rationals(scene.entry(s, "g"));
  t.b = in.rationals(scene.entry(s, "b"));
  ObstructionCheck check;
  try {
    check = verify_obstruction_cocycle(dc, t);
  } catch (const DomainError& err) {
    throw SceneError(scene.source, s.line, 1, err.what());
  }
  Report rep;
  rep.decision = check.all_hold() ? Outcome::Positive : Outcome::Negative;
  rep.witnesses["equations"] = check.equations;
  rep.witnesses["is_coboundary"] = check.is_coboundary;
  static const char* names[4] = {"(1) cech theta = 0", "(2) cech g + ce theta = 0", "(3) cech b - ce g = 0", "(4) ce b = 0"};
  for (std::size_t k = 0; k < 4; ++k) rep.summary.push_back(std::string(names[k]) + ": " + (check.equations[k] ? "holds" : "FAILS"));
  if (check.is_coboundary) {
    rep.witnesses["rho"] = str_vector(check.rho);
    rep.witnesses["h"] = str_vector(check.h);
    rep.summary.push_back("class vanishes: primitive rho=" + vector_text(check.rho) + " h=" + vector_text(check.h));
  } else if (check.all_hold()) {
    rep.summary.push_back("cocycle with nonzero class");
  }
  return rep;
}

inline LieAlgebra::Constants read_constants(const SceneReader& in, const SceneEntry& e, std::size_t dim) {
  const auto& scene = in.scene();
  LieAlgebra::Constants c(dim, std::vector<QVector>(dim, QVector(dim, 0)));
  const auto j = scene.get_json(e);
  if (!j.is_array()) scene.fail(e, "expected a list of [i, j, [coefficients]] entries");
  for (const auto& x : j) {
    if (!x.is_array() || x.size() != 3 || !x[0].is_number_unsigned() || !x[1].is_number_unsigned())
      scene.fail(e, "expected [i, j, [coefficients]], found " + x.dump());
    const std::size_t a = x[0].get<std::size_t>(), b = x[1].get<std::size_t>();
    if (a < 1 || b < 1 || a > dim || b > dim) scene.fail(e, "basis index out of range in " + x.dump());
    const auto v = scene.json_rationals(e, x[2]);
    if (v.size() != dim) scene.fail(e, "bracket value needs " + std::to_string(dim) + " coefficients in " + x.dump());
    c[a - 1][b - 1] = v;
    for (std::size_t k = 0; k < dim; ++k) c[b - 1][a - 1][k] = -v[k];
  }
  return c;
}

inline Report obstruction_lie(const Scene& scene, const Options& opts) {
  const SceneReader in(scene, opts);
  const auto& s = scene.section("lie");
  const std::size_t dim = static_cast<std::size_t>(scene.get_int(scene.entry(s, "dim")));
  std::optional<LieAlgebra> g;
  LieAlgebra::Constants c = LieAlgebra::Constants(dim, std::vector<QVector>(dim, QVector(dim, 0)));
  if (const auto* e = s.find("brackets")) c = read_constants(in, *e, dim);
  try {
    g.emplace(dim, c);
  } catch (const DomainError& err) {
    scene.fail(*s.find("brackets"), err.what());
  }
  FinLieData data{*g, {}, {}, {}};
  const auto& sub = scene.entry(s, "subalgebra");
  for (const auto& row : scene.json_matrix(sub, scene.get_json(sub))) data.subalgebra_basis.push_back(row);
  if (const auto* e = s.find("mu")) data.bracket_perturbation = read_constants(in, *e, dim);
  const auto& phi = scene.entry(s, "phi");
  for (const auto& row : scene.json_matrix(phi, scene.get_json(phi))) data.inclusion_perturbation.push_back(row);
  const auto res = [&] {
    try {
      return lie_subalgebra_obstruction(data);
    } catch (const DomainError& err) {
      throw SceneError(scene.source, s.line, 1, std::string("inconsistent Lie data: ") + err.what());
    }
  }();
  Report rep;
  rep.decision = res.class_is_zero ? Outcome::Positive : Outcome::Negative;
  rep.witnesses["class_is_zero"] = res.class_is_zero;
  rep.witnesses["cocycle_verified"] = res.cocycle_verified;
  json ob = json::array();
  for (const auto& v : res.obstruction.values) ob.push_back(str_vector(v));
  rep.witnesses["obstruction"] = ob;
  rep.summary.push_back(std::string("obstruction cocycle ") + (res.cocycle_verified ? "verified" : "NOT closed") + ", class " +
                        (res.class_is_zero ? "vanishes" : "is nonzero"));
  if (res.class_is_zero) {
    json ci = json::array();
    for (const auto& v : res.corrected_inclusion) {
      ci.push_back(str_vector(v));
      rep.summary.push_back("corrected phi: " + vector_text(v));
    }
    rep.witnesses["corrected_inclusion"] = ci;
  }
  return rep;
}

// ---- selftest -------------------------------------------------------------------------

namespace detail {

inline Rational random_small(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 3);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline Jet random_jet(std::mt19937_64& rng, const GermContext& ctx) {
  const auto monos = normal_monomials(ctx, 2);
  std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
  Jet::Terms t;
  for (int k = 0; k < 3; ++k) t[monos[pick(rng)]] += random_small(rng);
  return Jet(ctx, std::move(t), ctx.order());
}

inline LogDerivation random_field(std::mt19937_64& rng, const GermContext& ctx) {
  std::vector<Jet> b, a;
  for (int i = 0; i < ctx.r(); ++i) b.push_back(random_jet(rng, ctx));
  for (int j = ctx.r(); j < ctx.n(); ++j) a.push_back(random_jet(rng, ctx));
  return LogDerivation(ctx, b, a);
}

inline bool zero_field(const LogDerivation& v) {
  for (int k = 0; k < v.context().n(); ++k)
    if (!v.coefficient(k).agrees_with(Jet(v.context()))) return false;
  return true;
}

inline bool is_zero_matrix(const QMatrix& m) { return m.is_zero(); }

}  // namespace detail

/// Randomized identity checks on the library; one line per family.
inline Report selftest(std::uint64_t seed, int trials = 25) {
  std::mt19937_64 rng(seed);
  Report rep;
  rep.decision = Outcome::Positive;
  rep.order = kDefaultOrder;
  auto record = [&](const std::string& name, int passed) {
    rep.witnesses[name] = passed;
    rep.summary.push_back(name + ": " + std::to_string(passed) + "/" + std::to_string(trials));
    if (passed != trials) rep.decision = Outcome::Negative;
  };

  const GermContext ctx(3, 2, kDefaultOrder);
  int jacobi = 0, leibniz = 0, flat = 0;
  for (int t = 0; t < trials; ++t) {
    const auto a = detail::random_field(rng, ctx), b = detail::random_field(rng, ctx), c = detail::random_field(rng, ctx);
    jacobi += detail::zero_field(lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) + lie_bracket(c, lie_bracket(a, b)));
    const Jet f = detail::random_jet(rng, ctx), g = detail::random_jet(rng, ctx);
    const Jet lhs = nabla(a, T1Section(f * g)).representative();
    const Jet rhs = T1Section(a.apply(f) * g + f * nabla(a, T1Section(g)).representative()).representative();
    leibniz += lhs.agrees_with(rhs);
    // flatness of the connection: nabla_[a,b] = [nabla_a, nabla_b]
    const Jet curv = nabla(lie_bracket(a, b), T1Section(g)).representative() -
                     (nabla(a, nabla(b, T1Section(g))).representative() - nabla(b, nabla(a, T1Section(g))).representative());
    flat += T1Section(curv).representative().agrees_with(Jet(ctx));
  }
  record("jacobi", jacobi);
  record("nabla_leibniz", leibniz);
  record("nabla_flatness", flat);

  int squares = 0, roundtrip = 0;
  for (int t = 0; t < trials; ++t) {
    const auto data = random_gauge_leaf_data(rng, 3, {2, 2, 1}, 2);
    const DoubleComplex dc(data);
    bool ok = true;
    for (std::size_t n = 0; n + 1 < 3; ++n) ok = ok && detail::is_zero_matrix(dc.total(n + 1) * dc.total(n));
    squares += ok;
    const auto rho = random_vector(rng, dc.dim(1, 0)), h = random_vector(rng, dc.dim(0, 1));
    const auto check = verify_obstruction_cocycle(dc, total_coboundary(dc, rho, h));
    roundtrip += check.all_hold() && check.is_coboundary;
  }
  record("total_differential_squares_to_zero", squares);
  record("obstruction_coboundary_roundtrip", roundtrip);

  int table = 0;
  for (int t = 0; t < trials; ++t) {
    const long d = std::uniform_int_distribution<long>(-6, 6)(rng);
    const auto h = h_p1(d);
    table += h.h0 == static_cast<std::size_t>(std::max(0L, d + 1)) && h.h1 == static_cast<std::size_t>(std::max(0L, -d - 1));
  }
  record("p1_table", table);
  rep.witnesses["seed"] = seed;
  return rep;
}

// ---- dispatch ---------------------------------------------------------------------------

using Handler = std::function<Report(const Scene&, const Options&)>;

inline const std::map<std::string, Handler>& scene_commands() {
  static const std::map<std::string, Handler> table = {
      {"semistable check", semistable_check},
      {"cs paper", cs_paper},
      {"cs surface", cs_surface},
      {"pushout check", pushout_check},
      {"holonomy", holonomy},
      {"monoid saturate", [](const Scene& s, const Options& o) { return monoid_command(s, o, false); }},
      {"monoid check", [](const Scene& s, const Options& o) { return monoid_command(s, o, true); }},
      {"cohomology snc-curve", cohomology_snc_curve},
      {"leaf-complex", leaf_complex},
      {"obstruction verify", obstruction_verify},
      {"obstruction lie", obstruction_lie},
  };
  return table;
}

/// Runs `body`, turning library errors into decisions and filling in timing.
template <class F>
Report guarded(const std::string& command, const std::string& source, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  try {
    rep = body();
  } catch (const InputError& e) {
    rep = Report{};
    rep.decision = Outcome::InputError;
    rep.summary = {std::string("input error: ") + e.what()};
  } catch (const DomainError& e) {
    rep = Report{};
    rep.decision = Outcome::InputError;
    rep.summary = {std::string("inconsistent scene: ") + e.what()};
  } catch (const InconclusiveError& e) {
    rep = Report{};
    rep.decision = Outcome::Inconclusive;
    rep.summary = {std::string("inconclusive: ") + e.what()};
  } catch (const ResourceLimit& e) {
    rep = Report{};
    rep.decision = Outcome::Inconclusive;
    rep.summary = {std::string("inconclusive (resource limit): ") + e.what()};
  }
  rep.command = command;
  rep.source = source;
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline Report run_scene(const std::string& command, const Scene& scene, const Options& opts) {
  const auto& table = scene_commands();
  const auto it = table.find(command);
  if (it == table.end()) throw InputError("unknown command '" + command + "'");
  return it->second(scene, opts);
}

/// Loads a scene file and runs `command`; when `command` is empty the scene's own
/// `command = ...` entry is used.
inline Report run_scene_file(const std::string& path, std::string command, const Options& opts) {
  return guarded(command, path, [&] {
    const Scene scene = load_scene(path);
    if (command.empty()) {
      const auto* e = scene.top_entry("command");
      if (!e) throw SceneError(path, 1, 1, "scene has no 'command' entry");
      command = e->value;
    }
    return run_scene(command, scene, opts);
  });
}

}  // namespace logfol::cli
