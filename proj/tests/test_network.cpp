#include <cmath>
#include <filesystem>

#include <doctest.h>

#include "rpteng/error.hpp"
#include "rpteng/network.hpp"
#include "support.hpp"

using namespace rpteng;

namespace {

NetworkSpec widths(std::vector<int> w, int outputs = 1) {
  NetworkSpec spec;
  spec.hidden_widths = std::move(w);
  spec.output_dim = outputs;
  return spec;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("embedding maps onto the unit circle with period L") {
  NetworkSpec spec;
  spec.domain_length = 2.0;
  auto [s0, c0] = embed(spec, 0.0);
  CHECK(s0 == 0.0);
  CHECK(c0 == 1.0);
  auto [s1, c1] = embed(spec, 0.5);
  CHECK(s1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(c1) <= 1e-15);

  spec.domain_length = 80.0;
  auto [sa, ca] = embed(spec, 0.0);
  auto [sb, cb] = embed(spec, 80.0);
  CHECK(std::abs(sa - sb) <= 1e-15);
  CHECK(std::abs(ca - cb) <= 1e-15);
}

TEST_CASE("parameter counts match hand counts") {
  // (2*10+10) + 3*(10*10+10) + (10+1)
  CHECK(parameter_count(widths({10, 10, 10, 10})) == 371);
  // (2*20+20) + 3*(20*20+20) + (20*2+2)
  CHECK(parameter_count(widths({20, 20, 20, 20}, 2)) == 1362);
  // (2*5+5) + (5+1)
  CHECK(parameter_count(widths({5})) == 21);
  CHECK(parameter_count(widths({})) == 3);
}

TEST_CASE("all-zero parameters give a zero output") {
  for (Activation act : {Activation::tanh, Activation::sin, Activation::identity}) {
    const NetworkSpec spec = test::small_spec(act, 2);
    const FlatParams theta = FlatParams::Zero(parameter_count(spec));
    const Eigen::VectorXd u = forward(spec, theta, 0.37);
    CHECK(u.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("output is periodic in x") {
  NetworkSpec spec = test::small_spec(Activation::sin, 1, 80.0);
  const FlatParams theta = test::random_params(spec, 11);
  for (double x : {0.0, 3.3, 41.0, 79.9}) {
    const double u0 = forward(spec, theta, x)[0];
    const double u1 = forward(spec, theta, x + 80.0)[0];
    CHECK(std::abs(u0 - u1) <= 1e-14);
  }
}

TEST_CASE("single tanh unit reproduces tanh(sin(pi x))") {
  NetworkSpec spec = widths({1});
  spec.domain_length = 2.0;
  std::vector<Layer> layers(2);
  layers[0].weights = Eigen::MatrixXd{{1.0, 0.0}};
  layers[0].bias = Eigen::VectorXd::Zero(1);
  layers[1].weights = Eigen::MatrixXd{{1.0}};
  layers[1].bias = Eigen::VectorXd::Zero(1);
  const FlatParams theta = flatten(spec, layers);
  const double u = forward(spec, theta, 0.5)[0];
  CHECK(u == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
  CHECK(u == doctest::Approx(0.76159).epsilon(1e-5));
}

TEST_CASE("batched forward agrees with pointwise forward") {
  const NetworkSpec spec = test::small_spec(Activation::tanh, 2);
  const FlatParams theta = test::random_params(spec, 5);
  const Eigen::VectorXd xs = test::random_vector(13, 6);
  const Eigen::MatrixXd batch = forward(spec, theta, xs);
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    CHECK((batch.col(i) - forward(spec, theta, xs[i])).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("init_params is Glorot-uniform with zero biases and seeded") {
  const NetworkSpec spec = widths({10, 10, 10, 10});
  const FlatParams a = init_params(spec, 42);
  const FlatParams b = init_params(spec, 42);
  const FlatParams c = init_params(spec, 43);
  REQUIRE(a.size() == 371);
  CHECK((a.array() == b.array()).all());
  long differ = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) differ += a[i] != c[i];
  long nonzero = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) nonzero += a[i] != 0.0 || c[i] != 0.0;
  CHECK(double(differ) >= 0.99 * double(nonzero));

  for (const LayerShape& shape : layer_shapes(spec)) {
    const double bound = std::sqrt(6.0 / double(shape.in + shape.out));
    const auto w = a.segment(shape.weight_offset, Eigen::Index(shape.in) * shape.out);
    CHECK(w.cwiseAbs().maxCoeff() <= bound);
    CHECK(a.segment(shape.bias_offset, shape.out).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("flatten and unflatten round-trip bitwise") {
  const NetworkSpec spec = widths({4, 3}, 2);
  const FlatParams theta = test::random_params(spec, 3);
  const FlatParams back = flatten(spec, unflatten(spec, theta));
  CHECK((back.array() == theta.array()).all());
}

TEST_CASE("weights are stored row-major per layer") {
  const NetworkSpec spec = widths({3});
  FlatParams theta = FlatParams::Zero(parameter_count(spec));
  const auto shapes = layer_shapes(spec);
  theta[shapes[0].weight_offset + 1] = 7.0;  // row 0, column 1
  const auto layers = unflatten(spec, theta);
  CHECK(layers[0].weights(0, 1) == 7.0);
}

TEST_CASE("parameter length is checked") {
  const NetworkSpec spec = widths({3});
  CHECK_THROWS_AS(forward(spec, FlatParams::Zero(4), 0.0), Error);
  try {
    check_params(spec, FlatParams::Zero(4));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parameter_mismatch);
  }
}

TEST_CASE("parameter files round-trip and reject other architectures") {
  const NetworkSpec spec = widths({4, 4});
  const FlatParams theta = test::random_params(spec, 9);
  const auto path = std::filesystem::temp_directory_path() / "rpteng_params_roundtrip.txt";
  save_params(path, spec, theta);
  const FlatParams back = load_params(path, spec);
  CHECK((back.array() == theta.array()).all());
  CHECK_THROWS_AS(load_params(path, widths({4, 5})), Error);
  std::filesystem::remove(path);
}

TEST_CASE("activation names parse") {
  CHECK(parse_activation("tanh") == Activation::tanh);
  CHECK(parse_activation("sin") == Activation::sin);
  CHECK(parse_activation("identity") == Activation::identity);
  CHECK_THROWS_AS(parse_activation("relu"), Error);
}

}
