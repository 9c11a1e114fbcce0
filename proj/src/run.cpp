#include "spinsym/run.h"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include "spinsym/catalog.h"

namespace spinsym {

namespace {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string(kRunSchema)) != kRunSchema) {
    throw std::invalid_argument("unsupported run schema " + j.at("schema").dump());
  }
  RunConfig c;
  c.variant = parse_variant(j.value("variant", std::string("sp")));
  c.potential = PotentialConfig::from_json(j.value("potential", nlohmann::json::object()));
  if (j.contains("values")) {
    for (const auto& [k, v] : j.at("values").items()) c.env.params[k] = v.get<double>();
  }
  if (j.contains("functions")) {
    ParseContext ctx;
    for (const auto& [name, f] : j.at("functions").items()) {
      size_t arity = f.at("arity").get<size_t>();
      c.env.functions[name] =
          std::make_shared<ExprRealization>(arity, parse_expr(f.at("body").get<std::string>(), ctx), c.env.params);
    }
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.grid.n = get_or(g, "n", c.grid.n);
    c.grid.lo = get_or(g, "lo", c.grid.lo);
    c.grid.hi = get_or(g, "hi", c.grid.hi);
  }
  if (c.grid.n < 5 || !(c.grid.hi > c.grid.lo)) throw std::invalid_argument("invalid grid");
  if (j.contains("packet")) {
    const auto& p = j.at("packet");
    if (!p.is_array() || p.size() != 2) throw std::invalid_argument("packet must list two components");
    c.packet = {p[0].get<std::string>(), p[1].get<std::string>()};
  }
  c.spec.dt = get_or(j, "dt", c.spec.dt);
  c.spec.steps = get_or(j, "steps", c.spec.steps);
  c.spec.record_every = get_or(j, "record_every", c.spec.record_every);
  c.spec.tol = get_or(j, "tol", c.spec.tol);
  c.spec.stencil.accuracy = get_or(j, "accuracy", c.spec.stencil.accuracy);
  if (c.spec.stencil.accuracy != 2 && c.spec.stencil.accuracy != 4) {
    throw std::invalid_argument("accuracy must be 2 or 4");
  }
  std::string bc = j.value("boundary", std::string("dirichlet"));
  if (bc == "dirichlet") {
    c.spec.stencil.boundary = Boundary::Dirichlet;
  } else if (bc == "periodic") {
    c.spec.stencil.boundary = Boundary::Periodic;
  } else {
    throw std::invalid_argument("unknown boundary '" + bc + "'");
  }
  if (j.contains("track")) {
    for (const auto& [name, op] : j.at("track").items()) c.track.emplace_back(name, op.get<std::string>());
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json RunResult::to_json() const {
  nlohmann::json j;
  j["schema"] = "spinsym.drift/1";
  j["steps"] = trajectory.times.empty() ? 0 : trajectory.times.size() - 1;
  j["final_time"] = trajectory.times.empty() ? 0.0 : trajectory.times.back();
  j["max_step_norm_drift"] = trajectory.max_step_norm_drift;
  j["boundary_contact"] = trajectory.boundary_contact;
  j["drift"] = nlohmann::json::array();
  for (const auto& d : drift) j["drift"].push_back(d.to_json());
  return j;
}

RunResult run_conservation(const RunConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  ParseContext ctx = cfg.potential.ctx;
  DiffOp H = build_hamiltonian(cfg.potential, cfg.variant);
  std::vector<TrackedOperator> tracked;
  for (const auto& [name, text] : cfg.track) tracked.push_back({name, parse_generator(text, ctx)});
  GridState s0 =
      GridState::sample(cfg.grid, {parse_expr(cfg.packet[0], ctx), parse_expr(cfg.packet[1], ctx)}, cfg.env.params,
                        cfg.env.functions);
  if (s0.norm2() == 0) throw std::invalid_argument("packet vanishes on the grid");
  s0.normalize();
  RunResult r;
  r.trajectory = evolve(s0, H, cfg.spec, cfg.env, tracked);
  r.drift = drift_reports(r.trajectory, s0, tracked, cfg.env, cfg.spec.stencil);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace spinsym
