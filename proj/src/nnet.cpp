#include "qsafe/nnet.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qsafe/errors.hpp"

namespace qsafe {
namespace {

// Line-oriented reader over comma-separated numeric records. Comment lines
// start with "//"; blank lines and trailing commas are tolerated.
class RecordReader {
public:
  RecordReader(std::istream& is, std::string origin)
      : is_(is), origin_(std::move(origin)) {}

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::ParseError, origin_ + ":" + std::to_string(line_) + ": " + what);
  }

  // Next non-comment, non-blank record as numbers.
  std::vector<double> next_record(const char* what) {
    std::string line;
    while (std::getline(is_, line)) {
      ++line_;
      size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos) continue;
      if (line.compare(start, 2, "//") == 0) continue;
      return parse_fields(line);
    }
    fail(ErrorCode::ParseError,
         origin_ + ":" + std::to_string(line_) + ": unexpected end of file, expected " +
             std::string(what));
  }

  std::vector<double> expect(int count, const char* what) {
    std::vector<double> v = next_record(what);
    if (static_cast<int>(v.size()) != count)
      error(std::string("expected ") + std::to_string(count) + " values for " + what +
            ", got " + std::to_string(v.size()));
    return v;
  }

private:
  std::vector<double> parse_fields(const std::string& line) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= line.size()) {
      size_t comma = line.find(',', pos);
      std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
      size_t a = field.find_first_not_of(" \t\r");
      if (a != std::string::npos) {
        size_t b = field.find_last_not_of(" \t\r");
        field = field.substr(a, b - a + 1);
        char* end = nullptr;
        double value = std::strtod(field.c_str(), &end);
        if (end == field.c_str() || *end != '\0')
          error("not a number: '" + field + "'");
        out.push_back(value);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  std::istream& is_;
  std::string origin_;
  int line_ = 0;
};

int as_count(double v, RecordReader& r, const char* what) {
  if (v < 0 || v != std::floor(v) || v > 1e6)
    r.error(std::string("bad ") + what + " count");
  return static_cast<int>(v);
}

void put_row(std::ostream& os, const Eigen::VectorXd& v) {
  char buf[40];
  for (int i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,", v(i));
    os << buf;
  }
  os << '\n';
}

}  // namespace

Network::Network(std::vector<Layer> layers, Eigen::VectorXd input_min,
                 Eigen::VectorXd input_max, Eigen::VectorXd means,
                 Eigen::VectorXd ranges)
    : layers_(std::move(layers)), input_min_(std::move(input_min)),
      input_max_(std::move(input_max)), means_(std::move(means)),
      ranges_(std::move(ranges)) {
  if (layers_.empty()) fail(ErrorCode::InvalidArgument, "Network: no layers");
  int n = static_cast<int>(input_min_.size());
  if (input_max_.size() != n || means_.size() != n + 1 || ranges_.size() != n + 1)
    fail(ErrorCode::InvalidArgument, "Network: normalization size mismatch");
  if ((ranges_.array() <= 0.0).any())
    fail(ErrorCode::InvalidArgument, "Network: non-positive normalization range");
  if ((input_min_.array() > input_max_.array()).any())
    fail(ErrorCode::InvalidArgument, "Network: input min above max");
  int prev = n;
  for (const Layer& l : layers_) {
    if (l.weights.cols() != prev || l.weights.rows() != l.biases.size())
      fail(ErrorCode::InvalidArgument, "Network: layer dimension mismatch");
    prev = static_cast<int>(l.weights.rows());
  }
}

Eigen::VectorXd Network::execute(const Eigen::VectorXd& inputs) const {
  if (inputs.size() != input_count())
    fail(ErrorCode::InvalidArgument, "Network::execute: wrong input count");
  int n = input_count();
  Eigen::VectorXd x = inputs.cwiseMax(input_min_).cwiseMin(input_max_);
  x = (x - means_.head(n)).cwiseQuotient(ranges_.head(n));
  for (size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].weights * x + layers_[i].biases;
    if (i + 1 < layers_.size()) x = x.cwiseMax(0.0);
  }
  return (x.array() * ranges_(n) + means_(n)).matrix();
}

Network parse_nnet(std::istream& is, const std::string& origin) {
  RecordReader r(is, origin);
  std::vector<double> header = r.next_record("header counts");
  if (header.size() < 4) r.error("header needs numLayers,inputSize,outputSize,maxLayerSize");
  int num_layers = as_count(header[0], r, "layer");
  int input_size = as_count(header[1], r, "input");
  int output_size = as_count(header[2], r, "output");
  if (num_layers < 1 || input_size < 1 || output_size < 1)
    r.error("header counts must be positive");

  std::vector<double> sizes_rec = r.expect(num_layers + 1, "layer sizes");
  std::vector<int> sizes;
  for (double v : sizes_rec) sizes.push_back(as_count(v, r, "layer size"));
  if (sizes.front() != input_size) r.error("layer sizes disagree with input size");
  if (sizes.back() != output_size) r.error("layer sizes disagree with output size");

  r.next_record("symmetric flag");  // historical field, ignored

  auto as_vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<int>(v.size())).eval();
  };
  Eigen::VectorXd mins = as_vec(r.expect(input_size, "input minimums"));
  Eigen::VectorXd maxes = as_vec(r.expect(input_size, "input maximums"));
  Eigen::VectorXd means = as_vec(r.expect(input_size + 1, "normalization means"));
  Eigen::VectorXd ranges = as_vec(r.expect(input_size + 1, "normalization ranges"));
  for (int i = 0; i <= input_size; ++i)
    if (ranges(i) <= 0.0) r.error("non-positive normalization range");

  std::vector<Layer> layers;
  for (int l = 0; l < num_layers; ++l) {
    int in = sizes[l], out = sizes[l + 1];
    Layer layer;
    layer.weights.resize(out, in);
    for (int i = 0; i < out; ++i) {
      std::vector<double> row = r.expect(in, "weight row");
      layer.weights.row(i) = as_vec(row).transpose();
    }
    layer.biases.resize(out);
    for (int i = 0; i < out; ++i) layer.biases(i) = r.expect(1, "bias")[0];
    layers.push_back(std::move(layer));
  }
  try {
    return Network(std::move(layers), std::move(mins), std::move(maxes),
                   std::move(means), std::move(ranges));
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, origin + ": " + e.what());
  }
}

Network load_nnet(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::IoError, "cannot open network file: " + path);
  return parse_nnet(f, path);
}

void write_nnet(const Network& net, std::ostream& os) {
  os << "// advisory scoring network\n";
  int max_size = net.input_count();
  for (const Layer& l : net.layers())
    max_size = std::max(max_size, static_cast<int>(l.weights.rows()));
  os << net.layers().size() << ',' << net.input_count() << ',' << net.output_count()
     << ',' << max_size << ",\n";
  os << net.input_count() << ',';
  for (const Layer& l : net.layers()) os << l.weights.rows() << ',';
  os << '\n';
  os << "0,\n";  // symmetric flag
  put_row(os, net.input_min());
  put_row(os, net.input_max());
  put_row(os, net.means());
  put_row(os, net.ranges());
  for (const Layer& l : net.layers()) {
    for (int i = 0; i < l.weights.rows(); ++i) put_row(os, l.weights.row(i));
    for (int i = 0; i < l.biases.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g,\n", l.biases(i));
      os << buf;
    }
  }
}

Advisory select_advisory(const Eigen::VectorXd& scores, bool argmax) {
  if (scores.size() != kAdvisoryCount)
    fail(ErrorCode::InvalidArgument, "select_advisory: need 5 scores");
  int best = 0;
  for (int i = 1; i < kAdvisoryCount; ++i) {
    if (argmax ? scores(i) > scores(best) : scores(i) < scores(best)) best = i;
  }
  return static_cast<Advisory>(best);
}

Eigen::VectorXd run_network(const Network& net, const NetworkInput& in) {
  if (net.input_count() != 5)
    fail(ErrorCode::InvalidArgument, "run_network: expected a 5-input network");
  Eigen::VectorXd x(5);
  x << in.rho, in.theta, in.psi, in.v_own, in.v_int;
  return net.execute(x);
}

int NetworkSet::tau_grid_index(double tau) {
  if (tau < 0.0) tau = 0.0;
  int best = 0;
  double best_dist = std::abs(tau - kTauGrid[0]);
  for (int i = 1; i < static_cast<int>(kTauGrid.size()); ++i) {
    double d = std::abs(tau - kTauGrid[i]);
    if (d < best_dist) {  // ties keep the smaller breakpoint
      best = i;
      best_dist = d;
    }
  }
  return best;
}

void NetworkSet::insert(Advisory a_prev, int tau_idx, Network net) {
  if (tau_idx < 0 || tau_idx >= 9)
    fail(ErrorCode::InvalidArgument, "NetworkSet::insert: bad tau index");
  auto& slot = slots_[static_cast<int>(a_prev) * 9 + tau_idx];
  slot.clear();
  slot.push_back(std::move(net));
}

const Network* NetworkSet::find(Advisory a_prev, int tau_idx) const {
  if (tau_idx < 0 || tau_idx >= 9) return nullptr;
  const auto& slot = slots_[static_cast<int>(a_prev) * 9 + tau_idx];
  return slot.empty() ? nullptr : &slot.front();
}

const Network& NetworkSet::select(Advisory a_prev, double tau) const {
  int idx = tau_grid_index(tau);
  const Network* net = find(a_prev, idx);
  if (!net)
    fail(ErrorCode::MissingNetwork,
         std::string("network not loaded for previous advisory ") + advisory_name(a_prev) +
             ", tau breakpoint " + std::to_string(kTauGrid[idx]));
  return *net;
}

int NetworkSet::loaded_count() const {
  int n = 0;
  for (const auto& slot : slots_) n += static_cast<int>(slot.size());
  return n;
}

NetworkSet NetworkSet::load_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    fail(ErrorCode::IoError, "network directory not found: " + dir);
  NetworkSet set;
  for (int a = 1; a <= 5; ++a) {
    for (int t = 1; t <= 9; ++t) {
      char name[64];
      std::snprintf(name, sizeof name, "ACASXU_run2a_%d_%d_batch_2000.nnet", a, t);
      fs::path path = fs::path(dir) / name;
      if (!fs::exists(path)) continue;
      set.insert(static_cast<Advisory>(a - 1), t - 1, load_nnet(path.string()));
    }
  }
  if (set.loaded_count() == 0)
    fail(ErrorCode::IoError, "no ACASXU_run2a_*.nnet files in: " + dir);
  return set;
}

}  // namespace qsafe
