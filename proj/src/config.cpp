#include "proxima/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace proxima {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& msg) {
  throw ConfigError(context + ": " + msg);
}

void require_object(const json& j, const std::string& context) {
  if (!j.is_object()) fail(context, "expected an object");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& context) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) fail(context, "unknown key '" + item.key() + "'");
}

double get_number(const json& j, const std::string& context) {
  if (!j.is_number()) fail(context, "expected a number");
  return j.get<double>();
}

/// Box bounds may be the strings "inf" / "-inf" besides plain numbers.
double get_bound(const json& j, const std::string& context) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity")
      return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-infinity") return -std::numeric_limits<double>::infinity();
    fail(context, "unrecognized bound '" + s + "'");
  }
  fail(context, "expected a number or \"inf\"/\"-inf\"");
}

int get_int(const json& j, const std::string& context) {
  if (!j.is_number_integer()) fail(context, "expected an integer");
  return j.get<int>();
}

Vec get_vector(const json& j, const std::string& context) {
  if (!j.is_array()) fail(context, "expected an array of numbers");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(get_number(e, context));
  return v;
}

Vec get_bound_vector(const json& j, const std::string& context) {
  if (!j.is_array()) fail(context, "expected an array of bounds");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(get_bound(e, context));
  return v;
}

Matrix get_matrix(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) fail(context, "expected a nonempty array of rows");
  std::vector<Vec> rows;
  for (const auto& r : j) rows.push_back(get_vector(r, context));
  try {
    return Matrix::from_rows(rows);
  } catch (const Error& e) {
    fail(context, e.what());
  }
}

std::vector<std::size_t> get_indices(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) fail(context, "expected a nonempty array of indices");
  std::vector<std::size_t> out;
  for (const auto& e : j) {
    const int v = get_int(e, context);
    if (v < 0) fail(context, "indices must be nonnegative");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

ConvexSet parse_convex_set(const json& j, const std::string& context);

ConvexSet parse_convex_set_kind(const json& j, const std::string& kind,
                                const std::string& context) {
  try {
    if (kind == "box") {
      reject_unknown_keys(j, {"kind", "lower", "upper"}, context);
      if (!j.contains("lower") || !j.contains("upper")) fail(context, "box needs lower/upper");
      return ConvexSet::box(get_bound_vector(j.at("lower"), context + ".lower"),
                            get_bound_vector(j.at("upper"), context + ".upper"));
    }
    if (kind == "ball") {
      reject_unknown_keys(j, {"kind", "center", "radius"}, context);
      if (!j.contains("center") || !j.contains("radius"))
        fail(context, "ball needs center/radius");
      return ConvexSet::ball(get_vector(j.at("center"), context + ".center"),
                             get_number(j.at("radius"), context + ".radius"));
    }
    if (kind == "hyperplane" || kind == "halfspace") {
      reject_unknown_keys(j, {"kind", "normal", "offset"}, context);
      if (!j.contains("normal") || !j.contains("offset"))
        fail(context, kind + " needs normal/offset");
      Vec n = get_vector(j.at("normal"), context + ".normal");
      const double off = get_number(j.at("offset"), context + ".offset");
      return kind == "hyperplane" ? ConvexSet::hyperplane(std::move(n), off)
                                  : ConvexSet::halfspace(std::move(n), off);
    }
    if (kind == "affine") {
      reject_unknown_keys(j, {"kind", "A", "c"}, context);
      if (!j.contains("A") || !j.contains("c")) fail(context, "affine set needs A/c");
      return ConvexSet::affine(get_matrix(j.at("A"), context + ".A"),
                               get_vector(j.at("c"), context + ".c"));
    }
    if (kind == "simplex") {
      reject_unknown_keys(j, {"kind", "dim", "scale"}, context);
      if (!j.contains("dim") || !j.contains("scale")) fail(context, "simplex needs dim/scale");
      const int dim = get_int(j.at("dim"), context + ".dim");
      if (dim < 1) fail(context, "simplex dim must be >= 1");
      return ConvexSet::simplex(static_cast<std::size_t>(dim),
                                get_number(j.at("scale"), context + ".scale"));
    }
    if (kind == "points") {
      reject_unknown_keys(j, {"kind", "points"}, context);
      if (!j.contains("points")) fail(context, "points set needs points");
      std::vector<Vec> pts;
      for (const auto& p : j.at("points")) pts.push_back(get_vector(p, context + ".points"));
      return ConvexSet::finite_points(std::move(pts));
    }
    if (kind == "intersection") {
      reject_unknown_keys(j, {"kind", "members"}, context);
      if (!j.contains("members")) fail(context, "intersection needs members");
      std::vector<ConvexSet> members;
      std::size_t i = 0;
      for (const auto& m : j.at("members"))
        members.push_back(
            parse_convex_set(m, context + ".members[" + std::to_string(i++) + "]"));
      return ConvexSet::intersection(std::move(members));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(context, e.what());
  }
  fail(context, "unknown set kind '" + kind + "'");
}

ConvexSet parse_convex_set(const json& j, const std::string& context) {
  require_object(j, context);
  if (!j.contains("kind")) fail(context, "set needs a 'kind'");
  if (!j.at("kind").is_string()) fail(context, "'kind' must be a string");
  return parse_convex_set_kind(j, j.at("kind").get<std::string>(), context);
}

SetSpec parse_set_spec(const json& j, const std::string& context) {
  require_object(j, context);
  SetSpec spec;
  if (j.contains("indices")) {
    reject_unknown_keys(j, {"indices"}, context);
    spec.indices = get_indices(j.at("indices"), context + ".indices");
    return spec;
  }
  spec.convex = parse_convex_set(j, context);
  return spec;
}

MetricSpace parse_space(const json& j, const std::filesystem::path& base_dir,
                        const std::string& context) {
  require_object(j, context);
  reject_unknown_keys(j, {"euclidean", "finite"}, context);
  if (j.contains("euclidean") == j.contains("finite"))
    fail(context, "space needs exactly one of 'euclidean' or 'finite'");
  try {
    if (j.contains("euclidean")) {
      const json& e = j.at("euclidean");
      require_object(e, context + ".euclidean");
      reject_unknown_keys(e, {"dim", "p"}, context + ".euclidean");
      if (!e.contains("dim")) fail(context, "euclidean space needs 'dim'");
      const int dim = get_int(e.at("dim"), context + ".dim");
      if (dim < 1) fail(context, "dim must be >= 1");
      double p = 2.0;
      if (e.contains("p")) p = get_bound(e.at("p"), context + ".p");
      return MetricSpace::euclidean(static_cast<std::size_t>(dim), p);
    }
    const json& f = j.at("finite");
    require_object(f, context + ".finite");
    reject_unknown_keys(f, {"matrix", "matrix_file"}, context + ".finite");
    if (f.contains("matrix") == f.contains("matrix_file"))
      fail(context, "finite space needs exactly one of 'matrix' or 'matrix_file'");
    if (f.contains("matrix"))
      return MetricSpace::finite(get_matrix(f.at("matrix"), context + ".matrix"));
    if (!f.at("matrix_file").is_string()) fail(context, "'matrix_file' must be a string");
    const std::filesystem::path p =
        base_dir / f.at("matrix_file").get<std::string>();
    if (!std::filesystem::exists(p))
      fail(context, "matrix file does not exist: " + p.string());
    return MetricSpace::finite_from_file(p.string());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(context, e.what());
  }
}

Point parse_start(const json& j, const MetricSpace& space, const std::string& context) {
  try {
    if (space.is_finite()) {
      const int idx = get_int(j, context);
      if (idx < 0) fail(context, "start index must be nonnegative");
      Point p = Point::finite(static_cast<std::size_t>(idx));
      space.require_member(p);
      return p;
    }
    Point p = Point::euclidean(get_vector(j, context));
    space.require_member(p);
    return p;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(context, e.what());
  }
}

Operator parse_operator(const json& j, const std::string& context) {
  require_object(j, context);
  reject_unknown_keys(j, {"affine", "L", "eta"}, context);
  if (!j.contains("affine")) fail(context, "operator needs an 'affine' block");
  const json& a = j.at("affine");
  require_object(a, context + ".affine");
  reject_unknown_keys(a, {"M", "b"}, context + ".affine");
  if (!a.contains("M") || !a.contains("b")) fail(context, "affine operator needs M/b");
  std::optional<double> l, eta;
  if (j.contains("L")) l = get_number(j.at("L"), context + ".L");
  if (j.contains("eta")) eta = get_number(j.at("eta"), context + ".eta");
  try {
    return Operator::affine(get_matrix(a.at("M"), context + ".M"),
                            get_vector(a.at("b"), context + ".b"), l, eta);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(context, e.what());
  }
}

SolverConfig parse_solver(const json& j, const MetricSpace& space, const std::string& context) {
  SolverConfig s;
  if (j.is_null()) return s;
  require_object(j, context);
  reject_unknown_keys(j, {"epsilon", "epsilon_stop", "max_iterations", "seed", "starts"},
                      context);
  if (j.contains("epsilon")) s.epsilon = get_number(j.at("epsilon"), context + ".epsilon");
  if (j.contains("epsilon_stop"))
    s.epsilon_stop = get_number(j.at("epsilon_stop"), context + ".epsilon_stop");
  if (j.contains("max_iterations"))
    s.max_iterations = get_int(j.at("max_iterations"), context + ".max_iterations");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() &&
        !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
      fail(context, "seed must be a nonnegative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (!(s.epsilon > 0.0)) fail(context, "epsilon must be > 0");
  if (!(s.epsilon_stop > 0.0)) fail(context, "epsilon_stop must be > 0");
  if (s.max_iterations < 1) fail(context, "max_iterations must be >= 1");
  if (j.contains("starts")) {
    if (!j.at("starts").is_array()) fail(context, "'starts' must be an array");
    std::size_t i = 0;
    for (const auto& st : j.at("starts"))
      s.starts.push_back(
          parse_start(st, space, context + ".starts[" + std::to_string(i++) + "]"));
  }
  return s;
}

}  // namespace

ProblemConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "config");
  reject_unknown_keys(doc, {"mode", "space", "A", "B", "K", "map", "solver"}, "config");
  ProblemConfig cfg;
  cfg.raw = doc;

  if (!doc.contains("mode") || !doc.at("mode").is_string())
    fail("config", "needs a string 'mode' (\"bpp\" or \"vi\")");
  const std::string mode = doc.at("mode").get<std::string>();
  if (mode == "bpp")
    cfg.mode = ProblemConfig::Mode::Bpp;
  else if (mode == "vi")
    cfg.mode = ProblemConfig::Mode::Vi;
  else
    fail("config", "mode must be \"bpp\" or \"vi\", got \"" + mode + "\"");

  if (!doc.contains("map")) fail("config", "needs a 'map' block");
  const json& map = doc.at("map");
  require_object(map, "config.map");

  if (cfg.mode == ProblemConfig::Mode::Bpp) {
    if (!doc.contains("space")) fail("config", "bpp mode needs a 'space'");
    if (!doc.contains("A") || !doc.contains("B")) fail("config", "bpp mode needs sets A and B");
    if (doc.contains("K")) fail("config", "'K' belongs to vi mode");
    cfg.space = parse_space(doc.at("space"), base_dir, "config.space");
    cfg.a = parse_set_spec(doc.at("A"), "config.A");
    cfg.b = parse_set_spec(doc.at("B"), "config.B");

    reject_unknown_keys(map, {"affine", "table", "k"}, "config.map");
    if (map.contains("affine") == map.contains("table"))
      fail("config.map", "bpp map needs exactly one of 'affine' or 'table'");
    MapSpec ms;
    if (map.contains("k")) {
      const double k = get_number(map.at("k"), "config.map.k");
      if (!(k >= 0.0 && k < 1.0)) fail("config.map", "declared k must lie in [0, 1)");
      ms.declared_k = k;
    }
    if (map.contains("affine")) {
      const json& a = map.at("affine");
      require_object(a, "config.map.affine");
      reject_unknown_keys(a, {"M", "t"}, "config.map.affine");
      if (!a.contains("M") || !a.contains("t")) fail("config.map", "affine map needs M/t");
      ms.affine = std::make_pair(get_matrix(a.at("M"), "config.map.affine.M"),
                                 get_vector(a.at("t"), "config.map.affine.t"));
    } else {
      ms.table = get_indices(map.at("table"), "config.map.table");
    }
    cfg.map = std::move(ms);
  } else {
    if (!doc.contains("K")) fail("config", "vi mode needs a set 'K'");
    if (doc.contains("A") || doc.contains("B")) fail("config", "'A'/'B' belong to bpp mode");
    cfg.a = parse_set_spec(doc.at("K"), "config.K");
    if (!cfg.a.convex) fail("config.K", "K must be a convex set, not an index list");

    reject_unknown_keys(map, {"vi"}, "config.map");
    if (!map.contains("vi")) fail("config.map", "vi mode needs map.vi");
    const json& vi = map.at("vi");
    require_object(vi, "config.map.vi");
    reject_unknown_keys(vi, {"operator", "lambda"}, "config.map.vi");
    if (!vi.contains("operator")) fail("config.map.vi", "needs an 'operator'");
    ViSpec vs{parse_operator(vi.at("operator"), "config.map.vi.operator"), std::nullopt};
    if (vi.contains("lambda")) {
      const json& l = vi.at("lambda");
      if (l.is_string()) {
        if (l.get<std::string>() != "auto")
          fail("config.map.vi", "lambda must be a positive number or \"auto\"");
      } else {
        const double lv = get_number(l, "config.map.vi.lambda");
        if (!(lv > 0.0)) fail("config.map.vi", "lambda must be > 0");
        vs.lambda = lv;
      }
    }
    cfg.vi = std::move(vs);

    if (doc.contains("space")) {
      cfg.space = parse_space(doc.at("space"), base_dir, "config.space");
      if (!cfg.space->is_euclidean() || cfg.space->norm_order() != 2.0)
        fail("config.space", "vi mode needs a euclidean 2-norm space");
      if (cfg.space->size() != cfg.a.convex->dim())
        fail("config.space", "space and K dimensions differ");
    } else {
      cfg.space = MetricSpace::euclidean(cfg.a.convex->dim(), 2.0);
    }
    if (cfg.vi->op.dim() != cfg.a.convex->dim())
      fail("config", "operator and K dimensions differ");
  }

  cfg.solver = parse_solver(doc.contains("solver") ? doc.at("solver") : json(),
                            *cfg.space, "config.solver");

  if (cfg.mode == ProblemConfig::Mode::Bpp && cfg.solver.starts.empty())
    fail("config.solver", "bpp mode needs at least one start in 'starts'");

  // structural cross-checks between the space and the sets
  if (cfg.space->is_finite()) {
    if (cfg.mode == ProblemConfig::Mode::Vi) fail("config", "vi mode needs a euclidean space");
    if (cfg.a.convex || cfg.b.convex)
      fail("config", "finite spaces take index-list sets");
    if (cfg.map->affine) fail("config.map", "finite spaces take table maps");
  } else if (cfg.mode == ProblemConfig::Mode::Bpp) {
    if (!cfg.a.convex || !cfg.b.convex)
      fail("config", "euclidean spaces take convex sets, not index lists");
    if (cfg.map->table) fail("config.map", "euclidean spaces take affine maps");
    if (cfg.a.convex->dim() != cfg.space->size() || cfg.b.convex->dim() != cfg.space->size())
      fail("config", "set dimensions do not match the space");
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, std::filesystem::path(path).parent_path());
}

ProximalPair build_pair(const ProblemConfig& cfg) {
  PairOptions opts;
  opts.eps = cfg.solver.epsilon;
  if (cfg.space->is_finite())
    return ProximalPair::finite(*cfg.space, cfg.a.indices, cfg.b.indices, opts);
  if (cfg.mode == ProblemConfig::Mode::Vi)
    return ProximalPair::convex(*cfg.space, *cfg.a.convex, *cfg.a.convex, opts);
  return ProximalPair::convex(*cfg.space, *cfg.a.convex, *cfg.b.convex, opts);
}

ProximalMap build_map(const ProblemConfig& cfg, ProximalPair pair) {
  if (!cfg.map) throw ConfigError("config has no bpp map");
  if (cfg.map->affine)
    return ProximalMap::affine(std::move(pair), cfg.map->affine->first,
                               cfg.map->affine->second, cfg.map->declared_k,
                               cfg.solver.epsilon);
  return ProximalMap::table(std::move(pair), *cfg.map->table, cfg.map->declared_k,
                            cfg.solver.epsilon);
}

VIProblem build_vi_problem(const ProblemConfig& cfg) {
  if (!cfg.vi) throw ConfigError("config has no vi block");
  return VIProblem{*cfg.a.convex, cfg.vi->op, cfg.vi->lambda};
}

Point parse_inline_point(const std::string& text, const MetricSpace& space) {
  if (space.is_finite()) {
    try {
      std::size_t consumed = 0;
      const long idx = std::stol(text, &consumed);
      if (consumed != text.size() || idx < 0)
        throw ConfigError("point index must be a nonnegative integer");
      Point p = Point::finite(static_cast<std::size_t>(idx));
      space.require_member(p);
      return p;
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + text + "' as a point index");
    }
  }
  Vec coords;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t consumed = 0;
      coords.push_back(std::stod(tok, &consumed));
      while (consumed < tok.size() && std::isspace(static_cast<unsigned char>(tok[consumed])))
        ++consumed;
      if (consumed != tok.size()) throw ConfigError("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("cannot parse coordinate '" + tok + "'");
    }
  }
  try {
    Point p = Point::euclidean(std::move(coords));
    space.require_member(p);
    return p;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace proxima
