#include "cli/config.hpp"

#include <cmath>
#include <sstream>

namespace purify::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidParameter("not a number: '" + s + "'");
  }
  if (used != s.size()) throw InvalidParameter("not a number: '" + s + "'");
  return v;
}

std::int64_t to_pool(const std::string& s) {
  if (s.rfind("2^", 0) == 0) {
    const double e = to_double(s.substr(2));
    if (e < 0 || e > 40 || e != std::floor(e)) throw InvalidParameter("bad exponent in '" + s + "'");
    return std::int64_t{1} << static_cast<int>(e);
  }
  const double v = to_double(s);
  if (v < 1 || v != std::floor(v)) throw InvalidParameter("pool sizes must be positive integers");
  return static_cast<std::int64_t>(v);
}

template <class T>
void require_monotone(const std::vector<T>& grid, const std::string& text) {
  if (grid.empty()) throw InvalidParameter("empty grid '" + text + "'");
  bool up = true, down = true;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    up = up && grid[k] > grid[k - 1];
    down = down && grid[k] < grid[k - 1];
  }
  if (!up && !down) throw InvalidParameter("grid '" + text + "' is not strictly monotone");
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  const std::vector<std::string> range = split(text, ':');
  if (range.size() == 3) {
    const double lo = to_double(range[0]);
    const double hi = to_double(range[1]);
    const double count = to_double(range[2]);
    if (count < 1 || count != std::floor(count))
      throw InvalidParameter("grid count must be a positive integer");
    const int n = static_cast<int>(count);
    for (int k = 0; k < n; ++k)
      grid.push_back(n == 1 ? lo : k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1));
  } else if (range.size() == 1) {
    for (const std::string& s : split(text, ',')) grid.push_back(to_double(s));
  } else {
    throw InvalidParameter("grid '" + text + "' is neither start:stop:count nor a list");
  }
  require_monotone(grid, text);
  return grid;
}

std::vector<std::int64_t> parse_pool_grid(const std::string& text) {
  std::vector<std::int64_t> grid;
  const std::vector<std::string> range = split(text, ':');
  if (range.size() == 2) {
    const std::int64_t lo = to_pool(range[0]);
    const std::int64_t hi = to_pool(range[1]);
    if ((lo & (lo - 1)) || (hi & (hi - 1)) || lo > hi)
      throw InvalidParameter("pool range must run between two powers of two");
    for (std::int64_t n = lo; n <= hi; n *= 2) grid.push_back(n);
  } else if (range.size() == 1) {
    for (const std::string& s : split(text, ',')) grid.push_back(to_pool(s));
  } else {
    throw InvalidParameter("pool grid '" + text + "' not understood");
  }
  require_monotone(grid, text);
  return grid;
}

ChannelSpec channel_shape(const SweepConfig& config) {
  ChannelSpec shape;
  shape.kind = parse_channel_kind(config.channel);
  if (shape.kind == ChannelKind::Pauli) {
    shape.w_z = 1.0 / 2.0;
    shape.w_x = 1.0 / 3.0;
    shape.w_y = 1.0 / 6.0;
    if (!config.pauli_weights.empty()) {
      const std::vector<std::string> w = split(config.pauli_weights, ',');
      if (w.size() != 3) throw InvalidParameter("--pauli-weights needs three values wz,wx,wy");
      shape.w_z = to_double(w[0]);
      shape.w_x = to_double(w[1]);
      shape.w_y = to_double(w[2]);
      if (std::min({shape.w_z, shape.w_x, shape.w_y}) < 0 ||
          std::abs(shape.w_z + shape.w_x + shape.w_y - 1.0) > 1e-12)
        throw InvalidParameter("Pauli weights must be non-negative and sum to 1");
    }
  }
  return shape;
}

std::vector<GridPoint> make_grid(const SweepConfig& config, const std::string& fallback_flag,
                                 const std::string& fallback_grid) {
  std::string flag, text;
  int given = 0;
  for (const auto& [name, value] : {std::pair<std::string, std::string>{"p", config.p_grid},
                                    {"gamma", config.gamma_grid},
                                    {"werner-f", config.werner_grid},
                                    {"f-initial", config.fidelity_grid}}) {
    if (value.empty()) continue;
    ++given;
    flag = name;
    text = value;
  }
  if (given > 1)
    throw InvalidParameter("give only one of --p, --gamma, --werner-f, --f-initial");
  if (given == 0) {
    flag = fallback_flag;
    text = fallback_grid;
  }
  if (text.empty()) throw InvalidParameter("an initial state is required (--p, --gamma, --werner-f or --f-initial)");

  const ChannelSpec shape = channel_shape(config);
  const bool damping = shape.kind == ChannelKind::AmplitudeDamping;
  if ((flag == "p" && damping) || (flag == "gamma" && !damping))
    throw InvalidParameter("--p applies to Pauli-type channels, --gamma to amplitude damping");

  std::vector<GridPoint> grid;
  for (double value : parse_grid(text)) {
    if (flag == "werner-f") {
      if (!(value >= 0.0 && value <= 1.0)) throw InvalidParameter("Werner fidelity outside [0, 1]");
      grid.push_back({value, werner(value)});
      continue;
    }
    ChannelSpec channel = shape;
    if (flag == "f-initial") {
      channel = channel_for_fidelity(shape, value);
    } else {
      if (!(value >= 0.0 && value <= 1.0))
        throw InvalidParameter("channel parameter outside [0, 1]");
      channel.strength = value;
    }
    grid.push_back({channel.strength, channel_bell_diagonal(channel)});
  }
  return grid;
}

}  // namespace purify::cli
