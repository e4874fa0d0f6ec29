#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "greenwalk/complex_geometry.hpp"

namespace greenwalk {

// Sampler configuration. Results are a pure function of the configuration:
// every path owns an RNG stream derived from (seed, path index), rare event
// decisions use stateless counter-based uniforms keyed by (seed, path, step),
// and occupation is accumulated in integer ticks, so outputs are byte-identical
// for any worker count or scheduling.
struct MCConfig {
    std::int64_t n_paths = 10'000;
    double dt = 1e-3;                  // base time step
    std::uint64_t seed = 0;
    int workers = 1;                   // 0 = hardware concurrency
    double angular_cap = kPi / 8.0;    // max |arg increment| per step, in (0, pi/4]
    bool bridge_correction = true;     // exp(-2 d1 d2 / dt) boundary-crossing test
    // Power-of-two step coarsening away from every resolution constraint
    // (occupation region, domain boundary, winding angular cap). Increments
    // stay exactly Gaussian and line-boundary crossing stays exact at any dt,
    // so estimates are unaffected where they are measured; without it the
    // heavy-tailed winding and half-plane runs are intractable.
    bool adaptive_stepping = true;
    std::int64_t max_steps_per_path = 100'000'000;
};

void validate(const MCConfig& cfg);

struct PathSample {
    enum class Stop { HitBoundary, WoundOut, Truncated };

    std::vector<Complex> points;   // committed step endpoints, points[0] = start
    std::vector<double> times;     // strictly increasing, times[0] = 0
    Stop stopped = Stop::HitBoundary;
    Complex stop_position{0.0, 0.0};
    int winding_sign = 0;          // +-1 for WoundOut
    double total_arg = 0.0;        // continuous argument at the stop (winding runs)
};

struct GridSpec {
    double x0 = -1.0, y0 = -1.0, x1 = 1.0, y1 = 1.0;
    int nx = 64, ny = 64;

    double dx() const { return (x1 - x0) / nx; }
    double dy() const { return (y1 - y0) / ny; }
};

// Binned occupation time, normalized to an empirical Green's density.
// Accumulation is in unsigned 64-bit ticks of dt / 2^20, so merging is exact
// integer addition: associative, commutative, and scheduling-independent.
class OccupationGrid {
public:
    static constexpr int kBatches = 32;   // path i belongs to batch i % 32

    OccupationGrid() = default;
    OccupationGrid(const GridSpec& spec, double dt);

    const GridSpec& spec() const { return spec_; }
    double dt() const { return dt_; }
    std::int64_t n_paths() const { return n_paths_; }
    std::int64_t truncated_paths() const { return truncated_paths_; }

    // Density estimate of G_rule(start, cell center): time per unit area per path.
    double density(int ix, int iy) const;
    // Standard error of the density across the 32 path batches.
    double std_error(int ix, int iy) const;

    std::uint64_t ticks(int ix, int iy) const;
    std::uint64_t batch_ticks(int batch, int ix, int iy) const;

    void add_ticks(int batch, int ix, int iy, std::uint64_t ticks);
    void add_paths(std::int64_t n, std::int64_t truncated);

    // Exact integer merge of a grid with identical spec and dt.
    void merge(const OccupationGrid& other);

    // CSV: header "x0,y0,dx,dy,nx,ny", then ny row-major density lines.
    void write_csv(std::ostream& out) const;
    void write_stderr_csv(std::ostream& out) const;

private:
    GridSpec spec_{};
    double dt_ = 0.0;
    std::int64_t n_paths_ = 0;
    std::int64_t truncated_paths_ = 0;
    std::vector<std::uint64_t> cell_ticks_;         // nx*ny, row-major iy*nx+ix
    std::vector<std::uint64_t> batch_cell_ticks_;   // kBatches * nx * ny
};

// Parse a density CSV back into (spec, values); used by round-trip checks.
struct ParsedGridCsv {
    GridSpec spec;
    std::vector<double> values;
};
ParsedGridCsv parse_grid_csv(std::istream& in);

// Single Brownian path run to its stopping rule, with the full trajectory
// recorded. Winding runs track the continuous argument exactly (branch-cut
// crossing count plus principal argument) and enforce |arg increment| <=
// angular_cap per committed step via prospective sizing and bridge bisection.
PathSample sample_path(Complex start, const StoppingRule& rule, const MCConfig& cfg);

// Stop positions of n paths, without trajectory recording (distribution tests).
std::vector<Complex> sample_stop_positions(Complex start, const StoppingRule& rule,
                                           std::int64_t n_paths, const MCConfig& cfg);

// Occupation density over a rectangular grid: each step credits its dt to the
// cell containing the step midpoint.
OccupationGrid occupation_density(Complex start, const StoppingRule& rule,
                                  const GridSpec& grid, const MCConfig& cfg);

// Pointwise image of a sampled path under an analytic map, with the clock
// reclocked by the trapezoidal rule on |f'|^2.
PathSample project_path(const PathSample& sample, const AnalyticMap& map);

struct PointEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t truncated_paths = 0;
};

// Green's value estimate from occupation time in the disk window of radius
// window_radius about w. Raises biased_window when the window touches the source.
PointEstimate estimate_greens(Complex start, const StoppingRule& rule, Complex w,
                              double window_radius, const MCConfig& cfg);

// JSON summary of a grid run: bounds, shape, densities, stderr, config echo.
std::string grid_summary_json(const OccupationGrid& grid, Complex start,
                              const StoppingRule& rule, const MCConfig& cfg);

} // namespace greenwalk
