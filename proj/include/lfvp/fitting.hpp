#pragma once

#include <limits>
#include <string>
#include <vector>

namespace lfvp {

struct TimeSeries
{
  std::vector<double> t;
  std::vector<double> y;
};

struct FitWindow
{
  double from = -std::numeric_limits<double>::infinity();
  double to = std::numeric_limits<double>::infinity();
};

struct Peak
{
  double t;
  double y;
};

/// Local maxima of y inside the window, refined by a parabola through the three
/// samples around each one (on log y when `log_scale`). Maxima whose prominence is
/// below `min_prominence` times a reference are dropped, which filters ripples
/// riding on a slower oscillation. The reference is the peak's own height on a log
/// scale (decaying envelopes) and the range of y over the window otherwise.
std::vector<Peak> find_peaks(const TimeSeries& series, const FitWindow& window, bool log_scale,
                             double min_prominence = 0.25);

/// Least-squares slope of log y through the peaks in the window, restricted to the
/// leading run over which the peak heights change monotonically. Returns 0 for a
/// series that is constant over the window. Throws FitError with fewer than 4 peaks
/// in that run.
double fit_damping_rate(const TimeSeries& series, const FitWindow& window);

/// Mean spacing of successive maxima. `rectified` marks |sin|-type input, whose
/// maxima come twice per period, and doubles the spacing. Throws FitError unless
/// the window holds at least two maxima.
double fit_period(const TimeSeries& series, const FitWindow& window, bool rectified = false);

/// Reads columns `t` and `column` from a diagnostics CSV.
TimeSeries read_series(const std::string& csv_path, const std::string& column);

} // namespace lfvp
