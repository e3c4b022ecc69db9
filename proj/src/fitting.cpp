#include "lfvp/fitting.hpp"

#include "lfvp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lfvp {

namespace {

bool inside(const FitWindow& w, double t)
{
  return t >= w.from && t <= w.to;
}

// Vertex of the parabola through (t0,u0), (t1,u1), (t2,u2), clamped to [t0, t2].
Peak refine(double t0, double u0, double t1, double u1, double t2, double u2)
{
  const double d0 = t0 - t1;
  const double d2 = t2 - t1;
  const double r0 = u0 - u1;
  const double r2 = u2 - u1;
  const double det = d0 * d2 * (d2 - d0);
  if (det == 0.0)
    return {t1, u1};
  const double a = (r2 * d0 - r0 * d2) / det;
  const double b = (r0 * d2 * d2 - r2 * d0 * d0) / det;
  if (!(a < 0.0))
    return {t1, u1};
  const double x = std::clamp(-b / (2.0 * a), d0, d2);
  return {t1 + x, u1 + b * x + a * x * x};
}

bool is_flat(const TimeSeries& s, const FitWindow& w)
{
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (inside(w, s.t[i])) {
      lo = std::min(lo, s.y[i]);
      hi = std::max(hi, s.y[i]);
    }
  if (!(lo <= hi))
    return false;
  return hi - lo <= 1e-12 * std::max(std::abs(hi), std::abs(lo));
}

std::string window_text(const FitWindow& w)
{
  std::ostringstream s;
  s << "[" << w.from << ", " << w.to << "]";
  return s.str();
}

} // namespace

std::vector<Peak> find_peaks(const TimeSeries& series, const FitWindow& window, bool log_scale,
                             double min_prominence)
{
  const auto& t = series.t;
  const auto& y = series.y;
  if (t.size() != y.size())
    throw FitError("time series columns differ in length");

  std::size_t first = t.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (inside(window, t[i])) {
      first = std::min(first, i);
      last = std::max(last, i);
    }

  std::vector<Peak> peaks;
  if (first >= t.size() || last < first + 2)
    return peaks;
  const auto [lo, hi] = std::minmax_element(y.begin() + first, y.begin() + last + 1);
  const double range = *hi - *lo;

  for (std::size_t i = first + 1; i < last; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1]))
      continue;
    if (log_scale && !(y[i - 1] > 0.0 && y[i + 1] > 0.0))
      continue;

    // Descend on each side until a higher sample; a side that runs into the
    // window edge first says nothing about prominence and is ignored.
    double left_min = y[i];
    bool left_bounded = false;
    for (std::size_t j = i; j-- > first;) {
      if (y[j] > y[i]) {
        left_bounded = true;
        break;
      }
      left_min = std::min(left_min, y[j]);
    }
    double right_min = y[i];
    bool right_bounded = false;
    for (std::size_t j = i + 1; j <= last; ++j) {
      if (y[j] > y[i]) {
        right_bounded = true;
        break;
      }
      right_min = std::min(right_min, y[j]);
    }
    double base = std::min(left_min, right_min);
    if (left_bounded && right_bounded)
      base = std::max(left_min, right_min);
    else if (left_bounded)
      base = left_min;
    else if (right_bounded)
      base = right_min;
    const double prominence = y[i] - base;
    if (prominence < min_prominence * (log_scale ? std::abs(y[i]) : range))
      continue;

    if (log_scale) {
      const auto p = refine(t[i - 1], std::log(y[i - 1]), t[i], std::log(y[i]), t[i + 1], std::log(y[i + 1]));
      peaks.push_back({p.t, std::exp(p.y)});
    } else {
      peaks.push_back(refine(t[i - 1], y[i - 1], t[i], y[i], t[i + 1], y[i + 1]));
    }
  }
  return peaks;
}

double fit_damping_rate(const TimeSeries& series, const FitWindow& window)
{
  if (is_flat(series, window))
    return 0.0;
  auto peaks = find_peaks(series, window, true);
  // Keep the leading monotone run of maxima: once the envelope stops decaying
  // (or growing) the signal has reached its floor or a recurrence.
  for (std::size_t i = 2; i < peaks.size(); ++i)
    if ((peaks[i].y > peaks[i - 1].y) != (peaks[1].y > peaks[0].y)) {
      peaks.resize(i);
      break;
    }
  if (peaks.size() < 4)
    throw FitError("damping-rate fit needs at least 4 local maxima in " + window_text(window) + ", found " +
                   std::to_string(peaks.size()));
  double mt = 0.0;
  double my = 0.0;
  for (const auto& p : peaks) {
    mt += p.t;
    my += std::log(p.y);
  }
  mt /= peaks.size();
  my /= peaks.size();
  double num = 0.0;
  double den = 0.0;
  for (const auto& p : peaks) {
    num += (p.t - mt) * (std::log(p.y) - my);
    den += (p.t - mt) * (p.t - mt);
  }
  return num / den;
}

double fit_period(const TimeSeries& series, const FitWindow& window, bool rectified)
{
  const auto peaks = is_flat(series, window) ? std::vector<Peak>{} : find_peaks(series, window, false);
  if (peaks.size() < 2)
    throw FitError("period fit needs at least one full oscillation (2 maxima) in " + window_text(window) +
                   ", found " + std::to_string(peaks.size()) + " maxima");
  const double spacing = (peaks.back().t - peaks.front().t) / static_cast<double>(peaks.size() - 1);
  return rectified ? 2.0 * spacing : spacing;
}

TimeSeries read_series(const std::string& csv_path, const std::string& column)
{
  std::ifstream in(csv_path);
  if (!in)
    throw IoError("cannot open '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw FitError("'" + csv_path + "' is empty");

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ','))
      out.push_back(cell);
    return out;
  };
  const auto header = split(line);
  const auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw FitError("'" + csv_path + "' has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t it = find("t");
  const std::size_t iy = find(column);

  TimeSeries series;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty())
      continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw FitError("'" + csv_path + "' line " + std::to_string(row) + ": expected " +
                     std::to_string(header.size()) + " fields");
    try {
      series.t.push_back(std::stod(cells[it]));
      series.y.push_back(std::stod(cells[iy]));
    } catch (const std::exception&) {
      throw FitError("'" + csv_path + "' line " + std::to_string(row) + ": not a number");
    }
  }
  return series;
}

} // namespace lfvp
