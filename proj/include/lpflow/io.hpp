#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "lpflow/elliptic.hpp"
#include "lpflow/field.hpp"
#include "lpflow/harness.hpp"
#include "lpflow/inequality.hpp"
#include "lpflow/ns.hpp"

/// On-disk formats.
///
/// Field snapshot: a pair of files sharing a stem. "<stem>.json" holds the
/// geometry {format, version, dim, sizes, periods, components, storage,
/// data}; the companion data file holds node values in flatten order
/// (axis 0 fastest). "binary" storage is raw little-endian float64,
/// one component block after another; "csv" storage is one row per node
/// with one column per component, full-precision decimals, no header row.
///
/// Report CSV: header `sample_id,law_id,s,p,r,lhs,rhs,ratio,resolution`,
/// one row per inequality report. Solver log CSV: header
/// `iter,residual,contraction_estimate`. Monitor CSV: per-record rows of
/// time, energy accounting, hypothesis margins, and recorded Besov norms.
///
/// Trajectory store: a directory with "manifest.json" {format, version,
/// dt, dim, sizes, periods, resolution, times, frames[]} where each frame
/// entry names the density/velocity snapshot stems within the directory.
///
/// Suite summary JSON: {format, version, passed, laws{ id -> {c_emp[],
/// stability, ceiling, samples, degenerate, invalid, passed, verdict}}}.
/// Non-finite numbers (unbounded ceilings) serialize as null.
namespace lpflow {

/// Shortest decimal form of v that parses back to the identical double.
std::string format_full(double v);

enum class FieldStorage { binary, csv };

/// Write node values of f under the given stem (see format notes above).
void write_field(const std::filesystem::path& stem, const RealField& f,
                 FieldStorage storage = FieldStorage::binary);

/// Spectral convenience: stores the inverse transform's node values.
void write_field(const std::filesystem::path& stem, const SpectralField& f,
                 FieldStorage storage = FieldStorage::binary);

/// Read a field snapshot written by write_field. Throws IoError on missing
/// files, malformed headers, or data that disagrees with the header.
RealField read_field(const std::filesystem::path& stem);

/// Inequality reports as CSV (columns listed in the format notes).
void write_reports_csv(const std::filesystem::path& path,
                       const std::vector<InequalityReport>& reports);

/// Fixed-point pressure solver log as CSV.
void write_solver_log_csv(const std::filesystem::path& path,
                          const std::vector<EllipticLogRow>& log);

/// Verification-suite outcome as JSON (per-law constants and verdicts).
void write_suite_summary(const std::filesystem::path& path, const SuiteResult& result);

/// Monitor trace of a coupled-solver run: one row per monitor record with
/// t, kinetic energy, dissipation integral, energy residual, the margin of
/// every tracked hypothesis, and for each requested (s, r) pair the
/// recorded density, Stokes-flow, and perturbation Besov norms at those
/// indices. Requires result.monitor to be populated.
void write_monitors_csv(const std::filesystem::path& path, const RunResult& result,
                        const std::vector<std::pair<double, double>>& besov_indices = {});

/// Energy accounting of a run as CSV: t,kinetic,dissipation,residual.
void write_energy_csv(const std::filesystem::path& path,
                      const std::vector<EnergySample>& energy);

/// Store snapshots as a trajectory directory (see format notes above).
void write_trajectory(const std::filesystem::path& dir, const std::vector<Snapshot>& snapshots,
                      double dt, FieldStorage storage = FieldStorage::binary);

struct StoredTrajectory {
    double dt = 0.0;
    std::vector<Snapshot> snapshots;
};

/// Load a trajectory directory written by write_trajectory.
StoredTrajectory read_trajectory(const std::filesystem::path& dir);

/// One named polyline for write_svg_plot. x and y must match in length;
/// non-finite points split the line.
struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal SVG line plot: axes with ticks, optional log scales (points
/// with non-positive coordinates are dropped), a legend when more than
/// one series is named.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series, bool log_x = false,
                    bool log_y = false);

}  // namespace lpflow
