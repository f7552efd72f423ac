#include "rpteng/network.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "activation.hpp"
#include "rpteng/error.hpp"

namespace rpteng {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::tanh: return "tanh";
    case Activation::sin: return "sin";
    case Activation::identity: return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "sin") return Activation::sin;
  if (name == "identity") return Activation::identity;
  throw Error(ErrorKind::invalid_argument, "unknown activation '" + std::string(name) + "'");
}

std::vector<LayerShape> layer_shapes(const NetworkSpec& spec) {
  if (spec.output_dim < 1) throw Error(ErrorKind::invalid_argument, "output_dim must be >= 1");
  std::vector<LayerShape> shapes;
  int in = NetworkSpec::input_dim;
  Eigen::Index offset = 0;
  auto push = [&](int out) {
    if (out < 1) throw Error(ErrorKind::invalid_argument, "layer widths must be positive");
    LayerShape s;
    s.in = in;
    s.out = out;
    s.weight_offset = offset;
    s.bias_offset = offset + Eigen::Index(in) * out;
    offset = s.bias_offset + out;
    shapes.push_back(s);
    in = out;
  };
  for (int w : spec.hidden_widths) push(w);
  push(spec.output_dim);
  return shapes;
}

Eigen::Index parameter_count(const NetworkSpec& spec) {
  const auto shapes = layer_shapes(spec);
  return shapes.back().bias_offset + shapes.back().out;
}

void check_params(const NetworkSpec& spec, const FlatParams& theta) {
  const Eigen::Index expected = parameter_count(spec);
  if (theta.size() != expected) {
    throw Error(ErrorKind::parameter_mismatch, "expected " + std::to_string(expected) +
                                                   " parameters, got " +
                                                   std::to_string(theta.size()));
  }
}

std::vector<Layer> unflatten(const NetworkSpec& spec, const FlatParams& theta) {
  check_params(spec, theta);
  std::vector<Layer> layers;
  for (const auto& s : layer_shapes(spec)) {
    Layer layer;
    layer.weights = Eigen::Map<const RowMatrixXd>(theta.data() + s.weight_offset, s.out, s.in);
    layer.bias = theta.segment(s.bias_offset, s.out);
    layers.push_back(std::move(layer));
  }
  return layers;
}

FlatParams flatten(const NetworkSpec& spec, const std::vector<Layer>& layers) {
  const auto shapes = layer_shapes(spec);
  if (layers.size() != shapes.size()) {
    throw Error(ErrorKind::parameter_mismatch, "layer count does not match the NetworkSpec");
  }
  FlatParams theta(parameter_count(spec));
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto& s = shapes[l];
    if (layers[l].weights.rows() != s.out || layers[l].weights.cols() != s.in ||
        layers[l].bias.size() != s.out) {
      throw Error(ErrorKind::parameter_mismatch, "layer shape does not match the NetworkSpec");
    }
    Eigen::Map<RowMatrixXd>(theta.data() + s.weight_offset, s.out, s.in) = layers[l].weights;
    theta.segment(s.bias_offset, s.out) = layers[l].bias;
  }
  return theta;
}

std::pair<double, double> embed(const NetworkSpec& spec, double x) {
  const double phase = detail::embedding_phase(x, spec.domain_length);
  return {std::sin(phase), std::cos(phase)};
}

Eigen::VectorXd forward(const NetworkSpec& spec, const FlatParams& theta, double x) {
  Eigen::VectorXd xs(1);
  xs[0] = x;
  return forward(spec, theta, xs).col(0);
}

Eigen::MatrixXd forward(const NetworkSpec& spec, const FlatParams& theta,
                        const Eigen::Ref<const Eigen::VectorXd>& xs) {
  check_params(spec, theta);
  const auto shapes = layer_shapes(spec);
  Eigen::MatrixXd a(NetworkSpec::input_dim, xs.size());
  for (Eigen::Index p = 0; p < xs.size(); ++p) {
    const auto [s, c] = embed(spec, xs[p]);
    a(0, p) = s;
    a(1, p) = c;
  }
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const auto& s = shapes[l];
    Eigen::Map<const RowMatrixXd> w(theta.data() + s.weight_offset, s.out, s.in);
    Eigen::Map<const Eigen::VectorXd> b(theta.data() + s.bias_offset, s.out);
    Eigen::MatrixXd z = w * a;
    z.colwise() += b;
    if (l + 1 < shapes.size()) {
      a = detail::activate(spec.activation, z.array()).matrix();
    } else {
      a = std::move(z);
    }
  }
  return a;
}

FlatParams init_params(const NetworkSpec& spec, std::uint64_t seed) {
  FlatParams theta = FlatParams::Zero(parameter_count(spec));
  std::mt19937_64 rng(seed);
  for (const auto& s : layer_shapes(spec)) {
    const double limit = std::sqrt(6.0 / (s.in + s.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index k = 0; k < Eigen::Index(s.in) * s.out; ++k) {
      theta[s.weight_offset + k] = dist(rng);
    }
  }
  return theta;
}

std::string describe(const NetworkSpec& spec) {
  std::ostringstream os;
  os << std::setprecision(17) << "periodic-sincos L=" << spec.domain_length << " widths=";
  for (std::size_t i = 0; i < spec.hidden_widths.size(); ++i) {
    os << (i ? "," : "") << spec.hidden_widths[i];
  }
  os << " activation=" << to_string(spec.activation) << " out=" << spec.output_dim;
  return os.str();
}

std::uint64_t spec_hash(const NetworkSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : describe(spec)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// File layout:
//   rpteng-params 1
//   spec <describe(spec)>
//   spec_hash <16 hex digits>
//   n_theta <count>
//   one value per line, %.17g
void save_params(const std::filesystem::path& path, const NetworkSpec& spec,
                 const FlatParams& theta) {
  check_params(spec, theta);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << "rpteng-params 1\n";
  out << "spec " << describe(spec) << "\n";
  out << "spec_hash " << std::hex << std::setw(16) << std::setfill('0') << spec_hash(spec)
      << std::dec << "\n";
  out << "n_theta " << theta.size() << "\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < theta.size(); ++i) out << theta[i] << "\n";
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

FlatParams load_params(const std::filesystem::path& path, const NetworkSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::string line, key;
  std::getline(in, line);
  if (line != "rpteng-params 1") throw Error(ErrorKind::io, path.string() + ": bad header");
  std::getline(in, line);  // human-readable spec
  std::uint64_t hash = 0;
  Eigen::Index count = 0;
  in >> key >> std::hex >> hash >> std::dec;
  if (key != "spec_hash") throw Error(ErrorKind::io, path.string() + ": missing spec_hash");
  in >> key >> count;
  if (key != "n_theta") throw Error(ErrorKind::io, path.string() + ": missing n_theta");
  if (hash != spec_hash(spec) || count != parameter_count(spec)) {
    throw Error(ErrorKind::parameter_mismatch,
                path.string() + " was written for a different network (" + describe(spec) + ")");
  }
  FlatParams theta(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> theta[i])) throw Error(ErrorKind::io, path.string() + ": truncated values");
  }
  return theta;
}

}  // namespace rpteng
