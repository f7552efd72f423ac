#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace rpteng {

enum class Activation { tanh, sin, identity };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);

/// Periodic MLP ansatz: x -> (sin 2pi x/L, cos 2pi x/L) -> hidden layers -> affine output.
struct NetworkSpec {
  double domain_length = 2.0;
  std::vector<int> hidden_widths;
  Activation activation = Activation::tanh;
  int output_dim = 1;

  static constexpr int input_dim = 2;
};

/// Flat parameter vector. Layout is layer-major; within a layer the weight matrix (out x in)
/// is stored row-major, followed by the out biases.
using FlatParams = Eigen::VectorXd;

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LayerShape {
  int in = 0;
  int out = 0;
  Eigen::Index weight_offset = 0;
  Eigen::Index bias_offset = 0;
};

std::vector<LayerShape> layer_shapes(const NetworkSpec& spec);
Eigen::Index parameter_count(const NetworkSpec& spec);

/// Throws Error(parameter_mismatch) unless theta has parameter_count(spec) entries.
void check_params(const NetworkSpec& spec, const FlatParams& theta);

struct Layer {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;
};

std::vector<Layer> unflatten(const NetworkSpec& spec, const FlatParams& theta);
FlatParams flatten(const NetworkSpec& spec, const std::vector<Layer>& layers);

std::pair<double, double> embed(const NetworkSpec& spec, double x);

Eigen::VectorXd forward(const NetworkSpec& spec, const FlatParams& theta, double x);

/// Batched forward pass; returns output_dim x xs.size().
Eigen::MatrixXd forward(const NetworkSpec& spec, const FlatParams& theta,
                        const Eigen::Ref<const Eigen::VectorXd>& xs);

/// Glorot-uniform weights, zero biases, deterministic per seed.
FlatParams init_params(const NetworkSpec& spec, std::uint64_t seed);

/// FNV-1a hash of the canonical spec description; stored in parameter files.
std::uint64_t spec_hash(const NetworkSpec& spec);
std::string describe(const NetworkSpec& spec);

void save_params(const std::filesystem::path& path, const NetworkSpec& spec,
                 const FlatParams& theta);
FlatParams load_params(const std::filesystem::path& path, const NetworkSpec& spec);

}  // namespace rpteng
