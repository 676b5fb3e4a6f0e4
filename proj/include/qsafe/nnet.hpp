#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "qsafe/dynamics.hpp"

namespace qsafe {

struct Layer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd biases;
};

// Fully connected ReLU scoring network with the input clamp and affine
// normalization conventions of the standard .nnet text format.
class Network {
public:
  Network(std::vector<Layer> layers, Eigen::VectorXd input_min,
          Eigen::VectorXd input_max, Eigen::VectorXd means,
          Eigen::VectorXd ranges);

  int input_count() const { return static_cast<int>(input_min_.size()); }
  int output_count() const { return static_cast<int>(layers_.back().biases.size()); }
  const std::vector<Layer>& layers() const { return layers_; }
  const Eigen::VectorXd& input_min() const { return input_min_; }
  const Eigen::VectorXd& input_max() const { return input_max_; }
  const Eigen::VectorXd& means() const { return means_; }    // inputs + output
  const Eigen::VectorXd& ranges() const { return ranges_; }  // inputs + output

  // Clamp to the input box, normalize, run the ReLU layers, denormalize.
  Eigen::VectorXd execute(const Eigen::VectorXd& inputs) const;

private:
  std::vector<Layer> layers_;
  Eigen::VectorXd input_min_, input_max_, means_, ranges_;
};

// Parses the comma-separated .nnet text format. Tolerates comment lines,
// blank lines and trailing commas; reports malformed content as
// Error{ParseError} with "<origin>:<line>:" context.
Network parse_nnet(std::istream& is, const std::string& origin = "<stream>");
Network load_nnet(const std::string& path);

// Writes a file that parses back to bit-identical weights (17 significant digits).
void write_nnet(const Network& net, std::ostream& os);

// Lowest score wins ties broken toward the lower index; set argmax for the
// opposite convention.
Advisory select_advisory(const Eigen::VectorXd& scores, bool argmax = false);

Eigen::VectorXd run_network(const Network& net, const NetworkInput& in);

// The 5 x 9 grid of advisory networks indexed by previous advisory and by
// time-to-loss-of-vertical-separation breakpoint.
class NetworkSet {
public:
  static constexpr std::array<double, 9> kTauGrid = {0, 1, 5, 10, 20, 50, 60, 80, 100};

  // Nearest breakpoint, exact midpoint ties resolved toward the smaller value.
  static int tau_grid_index(double tau);

  void insert(Advisory a_prev, int tau_idx, Network net);
  const Network* find(Advisory a_prev, int tau_idx) const;
  const Network& select(Advisory a_prev, double tau) const;  // Error{MissingNetwork} if absent
  int loaded_count() const;

  // Loads ACASXU_run2a_<a>_<t>_batch_2000.nnet files; partial grids are fine,
  // an empty or missing directory is Error{IoError}.
  static NetworkSet load_directory(const std::string& dir);

private:
  std::array<std::vector<Network>, kAdvisoryCount * 9> slots_;  // 0 or 1 entries
};

}  // namespace qsafe
