#include "perfsim/cftp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <Eigen/Dense>

#include "perfsim/errors.hpp"

namespace perfsim::cftp {

namespace {

using StateStep = Step<std::size_t, std::size_t>;

std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

// Index of the piece containing u.
std::size_t piece_target(const std::vector<Piece>& pieces, double u) {
  for (const Piece& piece : pieces) {
    if (u < piece.upper) return piece.next;
  }
  return pieces.back().next;
}

bool is_constant(const std::vector<std::size_t>& image) {
  return std::adjacent_find(image.begin(), image.end(), std::not_equal_to<>()) == image.end();
}

// Number of closed communicating classes of the graph with edges K[x][y] > 0.
std::size_t closed_class_count(const std::vector<std::vector<double>>& kernel) {
  const std::size_t n = kernel.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (kernel[i][j] > 0.0) reach[i][j] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  // A state is in a closed class iff everything it reaches can reach it back.
  // Count the classes by their smallest member.
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool closed = true;
    bool smallest = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && !reach[j][i]) closed = false;
      if (j < i && reach[i][j] && reach[j][i]) smallest = false;
    }
    if (closed && smallest) ++count;
  }
  return count;
}

}  // namespace

Schedule doubling_schedule() {
  return [](std::size_t alpha) { return 2 * alpha; };
}

Schedule increment_schedule() {
  return [](std::size_t alpha) { return alpha + 1; };
}

UpdateSpec::UpdateSpec(std::vector<std::string> states,
                       std::vector<std::vector<std::vector<Piece>>> moves, Schedule schedule)
    : states_(std::move(states)), moves_(std::move(moves)), schedule_(std::move(schedule)) {
  if (states_.empty()) throw InvalidArgument("update: empty state space");
  if (moves_.empty()) throw InvalidArgument("update: no directions");
  if (!schedule_) throw InvalidArgument("update: missing schedule");
  for (const auto& by_state : moves_) {
    if (by_state.size() != states_.size()) {
      throw InvalidArgument("update: move table does not cover every state");
    }
    for (const auto& pieces : by_state) {
      if (pieces.empty()) throw InvalidArgument("update: state without moves");
      double previous = 0.0;
      for (const Piece& piece : pieces) {
        if (!(piece.upper > previous) || piece.upper > 1.0) {
          throw InvalidArgument("update: piece bounds must increase within (0, 1]");
        }
        if (piece.next >= states_.size()) throw InvalidArgument("update: move leaves the state space");
        previous = piece.upper;
      }
      if (previous != 1.0) throw InvalidArgument("update: last piece must end at 1");
    }
  }
}

std::size_t UpdateSpec::step(std::size_t x, const Primitive& r) const {
  return piece_target(moves_[r.direction][x], r.u);
}

std::size_t UpdateSpec::apply(std::size_t x, std::span<const Primitive> r) const {
  for (const Primitive& primitive : r) x = step(x, primitive);
  return x;
}

Randomness UpdateSpec::draw(UniformSource& src, std::size_t alpha) const {
  Randomness r(alpha);
  const auto last_direction = static_cast<std::int64_t>(moves_.size()) - 1;
  for (Primitive& primitive : r) {
    primitive.direction =
        last_direction == 0 ? 0 : static_cast<std::uint32_t>(src.uniform_int(0, last_direction));
    primitive.u = src.unit();
  }
  return r;
}

UpdateSpec UpdateSpec::with_schedule(Schedule schedule) const {
  return UpdateSpec(states_, moves_, std::move(schedule));
}

std::vector<std::vector<double>> UpdateSpec::kernel() const {
  const std::size_t n = size();
  const double direction_weight = 1.0 / static_cast<double>(directions());
  std::vector<std::vector<double>> k(n, std::vector<double>(n, 0.0));
  for (const auto& by_state : moves_) {
    for (std::size_t x = 0; x < n; ++x) {
      double lower = 0.0;
      for (const Piece& piece : by_state[x]) {
        k[x][piece.next] += direction_weight * (piece.upper - lower);
        lower = piece.upper;
      }
    }
  }
  return k;
}

std::vector<WeightedMap> UpdateSpec::elementary_maps() const {
  const double direction_weight = 1.0 / static_cast<double>(directions());
  std::map<std::vector<std::size_t>, double> maps;
  for (const auto& by_state : moves_) {
    std::vector<double> cuts{0.0};
    for (const auto& pieces : by_state) {
      for (const Piece& piece : pieces) cuts.push_back(piece.upper);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      std::vector<std::size_t> image(size());
      for (std::size_t x = 0; x < size(); ++x) image[x] = piece_target(by_state[x], cuts[c]);
      maps[image] += direction_weight * (cuts[c + 1] - cuts[c]);
    }
  }
  std::vector<WeightedMap> out;
  for (auto& [image, weight] : maps) out.push_back({image, weight});
  return out;
}

CouplingCertificate detect_coupling(const UpdateSpec& update, std::span<const Primitive> r) {
  const std::size_t first = update.apply(0, r);
  for (std::size_t x = 1; x < update.size(); ++x) {
    if (update.apply(x, r) != first) return {false, std::nullopt};
  }
  return {true, first};
}

double coalescence_probability(const UpdateSpec& update, std::size_t block_length) {
  const auto elementary = update.elementary_maps();
  std::vector<std::size_t> identity(update.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  std::map<std::vector<std::size_t>, double> current{{identity, 1.0}};
  for (std::size_t step = 0; step < block_length; ++step) {
    std::map<std::vector<std::size_t>, double> next;
    for (const auto& [image, weight] : current) {
      for (const WeightedMap& e : elementary) {
        std::vector<std::size_t> composed(image.size());
        for (std::size_t x = 0; x < image.size(); ++x) composed[x] = e.image[image[x]];
        next[composed] += weight * e.weight;
      }
    }
    current = std::move(next);
  }
  double coalesced = 0.0;
  for (const auto& [image, weight] : current) {
    if (is_constant(image)) coalesced += weight;
  }
  return coalesced;
}

PrsSpec<std::size_t, std::size_t> cftp_run(std::shared_ptr<const UpdateSpec> update,
                                           std::size_t alpha0, std::size_t max_block) {
  if (!update) throw InvalidArgument("cftp: null update");
  if (alpha0 < 1) throw InvalidArgument("cftp: alpha0 must be >= 1");
  return {[update, max_block](const std::size_t& alpha, Sources& s) {
            if (alpha > max_block) {
              throw DepthExceeded("cftp: randomness block of length " + std::to_string(alpha) +
                                  " exceeds the limit " + std::to_string(max_block) +
                                  "; coalescence probability is too small or zero");
            }
            Randomness r = update->draw(s.uniform, alpha);
            const CouplingCertificate certificate = detect_coupling(*update, r);
            if (certificate.coalesced) return StateStep::done(*certificate.image);
            return StateStep::call(update->next_parameter(alpha),
                                   [update, r = std::move(r)](std::size_t y, Sources&) {
                                     return StateStep::done(update->apply(y, r));
                                   });
          },
          alpha0};
}

std::vector<double> stationary_exact(const UpdateSpec& update) {
  const auto k = update.kernel();
  if (closed_class_count(k) != 1) {
    throw NoUniqueStationary("stationary_exact: kernel has more than one closed class");
  }
  const auto n = static_cast<Eigen::Index>(update.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = k[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] - (i == j ? 1.0 : 0.0);
    }
  }
  // One balance equation is redundant; replace it with the normalization.
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw NumericError("stationary_exact: singular balance system");
  const Eigen::VectorXd pi = lu.solve(b);
  std::vector<double> out(pi.data(), pi.data() + n);
  for (double& v : out) v = std::max(v, 0.0);
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= total;
  return out;
}

double verify_stationarity(const UpdateSpec& update, std::span<const double> pi) {
  if (pi.size() != update.size()) throw InvalidArgument("verify_stationarity: size mismatch");
  const auto k = update.kernel();
  double worst = 0.0;
  for (std::size_t y = 0; y < update.size(); ++y) {
    double pushed = 0.0;
    for (std::size_t x = 0; x < update.size(); ++x) pushed += pi[x] * k[x][y];
    worst = std::max(worst, std::abs(pushed - pi[y]));
  }
  return worst;
}

UpdateSpec metropolis_walk(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw InvalidArgument("metropolis_walk: empty state space");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("metropolis_walk: weights must be positive");
  }
  std::vector<std::vector<std::vector<Piece>>> moves(2, std::vector<std::vector<Piece>>(n));
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t x = 0; x < n; ++x) {
      const bool off_end = (d == 0 && x == 0) || (d == 1 && x + 1 == n);
      if (off_end) {
        moves[d][x] = {{1.0, x}};
        continue;
      }
      const std::size_t y = d == 0 ? x - 1 : x + 1;
      const double accept = std::min(1.0, weights[y] / weights[x]);
      if (accept >= 1.0) {
        moves[d][x] = {{1.0, y}};
      } else {
        moves[d][x] = {{accept, y}, {1.0, x}};
      }
    }
  }
  return UpdateSpec(index_labels(n), std::move(moves));
}

UpdateSpec walk3() { return metropolis_walk({1.0, 2.0, 3.0}); }

UpdateSpec lazy_walk(std::size_t k) {
  if (k == 0) throw InvalidArgument("lazy_walk: empty state space");
  std::vector<std::vector<std::vector<Piece>>> moves(2, std::vector<std::vector<Piece>>(k));
  for (std::size_t d = 0; d < 2; ++d) {
    for (std::size_t x = 0; x < k; ++x) {
      const bool off_end = (d == 0 && x == 0) || (d == 1 && x + 1 == k);
      if (off_end) {
        moves[d][x] = {{1.0, x}};
      } else {
        moves[d][x] = {{0.5, d == 0 ? x - 1 : x + 1}, {1.0, x}};
      }
    }
  }
  return UpdateSpec(index_labels(k), std::move(moves));
}

UpdateSpec kernel_chain(std::vector<std::string> states,
                        const std::vector<std::vector<double>>& kernel) {
  const std::size_t n = kernel.size();
  if (states.empty()) states = index_labels(n);
  if (states.size() != n) throw InvalidArgument("kernel_chain: state labels do not match the kernel");
  std::vector<std::vector<Piece>> by_state(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto& row = kernel[x];
    if (row.size() != n) throw InvalidArgument("kernel_chain: kernel must be square");
    double cumulative = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (!(row[y] >= 0.0) || !std::isfinite(row[y])) {
        throw InvalidArgument("kernel_chain: entries must be finite and >= 0");
      }
      if (row[y] == 0.0) continue;
      cumulative += row[y];
      by_state[x].push_back({std::min(cumulative, 1.0), y});
    }
    if (std::abs(cumulative - 1.0) > 1e-9) {
      throw InvalidArgument("kernel_chain: row " + std::to_string(x) + " sums to " +
                            std::to_string(cumulative));
    }
    by_state[x].back().upper = 1.0;
    // Rounding can collapse a tiny last entry onto 1; drop empty pieces.
    auto& pieces = by_state[x];
    std::vector<Piece> cleaned;
    double previous = 0.0;
    for (const Piece& piece : pieces) {
      if (piece.upper > previous) {
        cleaned.push_back(piece);
        previous = piece.upper;
      }
    }
    pieces = std::move(cleaned);
  }
  return UpdateSpec(std::move(states), {std::move(by_state)});
}

UpdateSpec two_state() { return kernel_chain({"0", "1"}, {{0.9, 0.1}, {0.2, 0.8}}); }

UpdateSpec chain_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("kernel") || !doc.at("kernel").is_array()) {
    throw InvalidArgument(R"(chain JSON needs {"kernel": [[...], ...]})");
  }
  std::vector<std::vector<double>> kernel;
  for (const auto& row : doc.at("kernel")) {
    if (!row.is_array()) throw InvalidArgument("chain JSON: kernel rows must be arrays");
    std::vector<double> values;
    for (const auto& v : row) {
      if (!v.is_number()) throw InvalidArgument("chain JSON: kernel entries must be numbers");
      values.push_back(v.get<double>());
    }
    kernel.push_back(std::move(values));
  }
  std::vector<std::string> states;
  if (doc.contains("states")) {
    for (const auto& label : doc.at("states")) {
      states.push_back(label.is_string() ? label.get<std::string>() : label.dump());
    }
  }
  return kernel_chain(std::move(states), kernel);
}

}  // namespace perfsim::cftp
