#include "wgflow/config.hpp"

#include <fstream>

namespace wgflow {

namespace {

Vector vector_from_json(const Json& j) {
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

Json vector_to_json(const Vector& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

}  // namespace

Json to_json(const Domain& d) {
  return Json{{"lower", vector_to_json(d.lower)}, {"upper", vector_to_json(d.upper)}};
}

Domain domain_from_json(const Json& j) {
  return Domain(vector_from_json(j.at("lower")), vector_from_json(j.at("upper")));
}

Json to_json(const KernelSpec& k) {
  if (k.kind == KernelSpec::Kind::Gaussian)
    return Json{{"kind", "gaussian"}, {"bandwidth", k.bandwidth}};
  return Json{{"kind", "polynomial"}, {"degree", k.degree}, {"offset", k.offset}};
}

KernelSpec kernel_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") return gaussian_kernel(j.at("bandwidth").get<double>());
  if (kind == "polynomial")
    return polynomial_kernel(j.at("degree").get<int>(),
                             j.value("offset", 1.0));
  throw std::invalid_argument("unknown kernel kind: " + kind);
}

Json to_json(const PotentialSpec& p) {
  if (p.kind == PotentialSpec::Kind::SineWell) return Json{{"kind", "sine-well"}};
  return Json{{"kind", "quadratic-ou"},
              {"a_diag", vector_to_json(p.a_diag)},
              {"b", vector_to_json(p.b)}};
}

PotentialSpec potential_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sine-well") return sine_well_potential();
  if (kind == "quadratic-ou")
    return quadratic_ou_potential(vector_from_json(j.at("a_diag")),
                                  vector_from_json(j.at("b")));
  throw std::invalid_argument("unknown potential kind: " + kind);
}

Json to_json(const FlowConfig& c) {
  return Json{
      {"gamma", c.gamma},
      {"tau", c.tau},
      {"n_samples", c.n_samples},
      {"m_substeps", c.m_substeps},
      {"kernel", to_json(c.kernel)},
      {"regularizer", c.regularizer_kind == Regularizer::Kind::Entropy ? "entropy" : "l2"},
      {"optimizer_tol", c.optimizer_tol},
      {"max_iter", c.max_iter},
      {"basis_mode", c.basis_mode == FlowConfig::BasisMode::Representer
                         ? "representer"
                         : "fixed"},
      {"basis_size", c.basis_size},
      {"warm_start", c.warm_start},
      {"adaptive_box", c.adaptive_box},
      {"box_sigma", c.box_sigma},
      {"quad_nodes_1d", c.quad_nodes_1d},
      {"quad_nodes_2d", c.quad_nodes_2d},
      {"quad_mc_points", c.quad_mc_points},
  };
}

FlowConfig flow_config_from_json(const Json& j, FlowConfig defaults) {
  FlowConfig c = std::move(defaults);
  c.gamma = j.value("gamma", c.gamma);
  c.tau = j.value("tau", c.tau);
  c.n_samples = j.value("n_samples", c.n_samples);
  c.m_substeps = j.value("m_substeps", c.m_substeps);
  if (j.contains("kernel")) c.kernel = kernel_from_json(j.at("kernel"));
  if (j.contains("regularizer")) {
    const std::string r = j.at("regularizer").get<std::string>();
    if (r == "entropy") c.regularizer_kind = Regularizer::Kind::Entropy;
    else if (r == "l2") c.regularizer_kind = Regularizer::Kind::L2;
    else throw std::invalid_argument("unknown regularizer: " + r);
  }
  c.optimizer_tol = j.value("optimizer_tol", c.optimizer_tol);
  c.max_iter = j.value("max_iter", c.max_iter);
  if (j.contains("basis_mode")) {
    const std::string m = j.at("basis_mode").get<std::string>();
    if (m == "representer") c.basis_mode = FlowConfig::BasisMode::Representer;
    else if (m == "fixed") c.basis_mode = FlowConfig::BasisMode::FixedBasis;
    else throw std::invalid_argument("unknown basis mode: " + m);
  }
  c.basis_size = j.value("basis_size", c.basis_size);
  c.warm_start = j.value("warm_start", c.warm_start);
  c.adaptive_box = j.value("adaptive_box", c.adaptive_box);
  c.box_sigma = j.value("box_sigma", c.box_sigma);
  c.quad_nodes_1d = j.value("quad_nodes_1d", c.quad_nodes_1d);
  c.quad_nodes_2d = j.value("quad_nodes_2d", c.quad_nodes_2d);
  c.quad_mc_points = j.value("quad_mc_points", c.quad_mc_points);
  c.validate();
  return c;
}

Json to_json(const GridSolverConfig& c) {
  return Json{{"n_nodes", c.n_nodes},
              {"lower", c.lower},
              {"upper", c.upper},
              {"dt", c.dt}};
}

GridSolverConfig grid_config_from_json(const Json& j, GridSolverConfig defaults) {
  GridSolverConfig c = defaults;
  c.n_nodes = j.value("n_nodes", c.n_nodes);
  c.lower = j.value("lower", c.lower);
  c.upper = j.value("upper", c.upper);
  c.dt = j.value("dt", c.dt);
  c.validate();
  return c;
}

Json to_json(const FilterConfig& c) {
  return Json{
      {"potential", to_json(c.potential)},
      {"beta", c.beta},
      {"grid", to_json(c.grid)},
      {"wgf", to_json(c.wgf)},
      {"pf_particles", c.pf_particles},
      {"pf_dt", c.pf_dt},
      {"gsf_components", c.gsf_components},
      {"gsf_init_mean_sd", c.gsf_init_mean_sd},
      {"gsf_init_var", c.gsf_init_var},
      {"init_mean", c.init_mean},
      {"init_sd", c.init_sd},
      {"ekf_init_mean_sd", c.ekf_init_mean_sd},
      {"kalman_init_var", c.kalman_init_var},
      {"ukf", Json{{"alpha", c.ukf.alpha}, {"beta", c.ukf.beta}, {"kappa", c.ukf.kappa}}},
  };
}

FilterConfig filter_config_from_json(const Json& j, FilterConfig defaults) {
  FilterConfig c = std::move(defaults);
  if (j.contains("potential")) c.potential = potential_from_json(j.at("potential"));
  c.beta = j.value("beta", c.beta);
  if (j.contains("grid")) c.grid = grid_config_from_json(j.at("grid"), c.grid);
  if (j.contains("wgf")) c.wgf = flow_config_from_json(j.at("wgf"), c.wgf);
  c.pf_particles = j.value("pf_particles", c.pf_particles);
  c.pf_dt = j.value("pf_dt", c.pf_dt);
  c.gsf_components = j.value("gsf_components", c.gsf_components);
  c.gsf_init_mean_sd = j.value("gsf_init_mean_sd", c.gsf_init_mean_sd);
  c.gsf_init_var = j.value("gsf_init_var", c.gsf_init_var);
  c.init_mean = j.value("init_mean", c.init_mean);
  c.init_sd = j.value("init_sd", c.init_sd);
  c.ekf_init_mean_sd = j.value("ekf_init_mean_sd", c.ekf_init_mean_sd);
  c.kalman_init_var = j.value("kalman_init_var", c.kalman_init_var);
  if (j.contains("ukf")) {
    const Json& u = j.at("ukf");
    c.ukf.alpha = u.value("alpha", c.ukf.alpha);
    c.ukf.beta = u.value("beta", c.ukf.beta);
    c.ukf.kappa = u.value("kappa", c.ukf.kappa);
  }
  return c;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace wgflow
