#include "chaosfit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "chaosfit/error.hpp"

namespace chaosfit {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot open '" + path.string() + "' for writing");
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw Error("write to '" + path.string() + "' failed");
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string where(std::size_t row, std::size_t col) {
    return "(row " + std::to_string(row) + ", column " + std::to_string(col) + ")";
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

void write_trajectories_csv(const TrajectorySet& set, const std::filesystem::path& path) {
    set.validate();
    auto os = open_out(path);
    os << 't';
    for (std::size_t k = 0; k < set.paths.size(); ++k) os << ",x" << (k + 1);
    os << '\n';
    for (std::size_t i = 0; i < set.grid.size(); ++i) {
        os << format_double(set.grid.at(i));
        for (const auto& p : set.paths) os << ',' << format_double(p[i]);
        os << '\n';
    }
    finish(os, path);
}

TrajectorySet ingest_csv(const std::filesystem::path& path, const std::optional<TimeGrid>& expected) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(is, line) || trim(line).empty()) throw ValidationError("'" + path.string() + "' is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || trim(header[0]) != "t") {
        throw ValidationError("header must be t,x1,...,xN");
    }
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (trim(header[c]) != "x" + std::to_string(c)) {
            throw ValidationError("unexpected header cell '" + trim(header[c]) + "' " + where(1, c + 1));
        }
    }
    const std::size_t N = header.size() - 1;

    std::vector<double> times;
    std::vector<Series> paths(N);
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ValidationError("ragged row: expected " + std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()) + " " + where(row, cells.size()));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string cell = trim(cells[c]);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw ValidationError("non-numeric cell '" + cell + "' " + where(row, c + 1));
            }
            if (!std::isfinite(v)) throw ValidationError("non-finite cell " + where(row, c + 1));
            if (c == 0) {
                times.push_back(v);
            } else {
                paths[c - 1].push_back(v);
            }
        }
    }
    if (times.size() < 3) throw ValidationError("'" + path.string() + "' needs at least 3 time points");

    const std::size_t n = times.size() - 1;
    const double T = times.back();
    if (!(T > 0.0)) throw ValidationError("final time must be positive");
    const double tol = 1e-9 * T;
    if (std::abs(times.front()) > tol) throw ValidationError("time grid must start at 0 " + where(2, 1));
    for (std::size_t i = 0; i <= n; ++i) {
        const double want = T * static_cast<double>(i) / static_cast<double>(n);
        if (std::abs(times[i] - want) > tol) {
            throw ValidationError("non-uniform time grid " + where(i + 2, 1));
        }
    }
    TimeGrid grid(T, n);
    if (expected) {
        if (expected->steps() != n || std::abs(expected->horizon() - T) > tol) {
            throw ValidationError("data grid (T=" + format_double(T) + ", n=" + std::to_string(n) +
                                  ") does not match the configured grid (T=" + format_double(expected->horizon()) +
                                  ", n=" + std::to_string(expected->steps()) + ")");
        }
        grid = *expected;
    }
    TrajectorySet set{grid, std::move(paths), std::nullopt};
    set.validate();
    return set;
}

double plateau_capacity(const TrajectorySet& set) {
    const Series mean = mean_trajectory(set);
    const std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(mean.size()))));
    double acc = 0.0;
    for (std::size_t i = mean.size() - tail; i < mean.size(); ++i) acc += mean[i];
    return acc / static_cast<double>(tail);
}

TrajectorySet normalize_by_capacity(const TrajectorySet& set, double capacity) {
    if (!(capacity > 0.0) || !std::isfinite(capacity)) throw ValidationError("carrying capacity must be > 0");
    TrajectorySet out = set;
    for (auto& p : out.paths) {
        for (auto& v : p) v /= capacity;
    }
    return out;
}

void write_coefficients_csv(const ChaosCoefficients& coeffs, const std::filesystem::path& path) {
    auto os = open_out(path);
    os << 't';
    for (const auto& m : coeffs.modes()) os << ',' << m.to_string();
    os << '\n';
    for (std::size_t i = 0; i < coeffs.grid().size(); ++i) {
        os << format_double(coeffs.grid().at(i));
        for (std::size_t k = 0; k < coeffs.mode_count(); ++k) os << ',' << format_double(coeffs.series(k)[i]);
        os << '\n';
    }
    finish(os, path);
}

void write_moments_csv(const ChaosCoefficients& coeffs, const std::filesystem::path& path) {
    const Series mean = wce_mean(coeffs);
    const Series var = wce_variance(coeffs);
    auto os = open_out(path);
    os << "t,mean,variance\n";
    for (std::size_t i = 0; i < mean.size(); ++i) {
        os << format_double(coeffs.grid().at(i)) << ',' << format_double(mean[i]) << ',' << format_double(var[i])
           << '\n';
    }
    finish(os, path);
}

void write_trace_csv(const OptimizerTrace& trace, const std::filesystem::path& path) {
    auto os = open_out(path);
    os << "iter,theta1,theta2,loss,grad_norm,gamma\n";
    for (const auto& r : trace.records) {
        os << r.iter << ',' << format_double(r.theta.drift) << ',' << format_double(r.theta.diffusion) << ','
           << format_double(r.loss) << ',' << format_double(r.grad_norm) << ',' << format_double(r.gamma) << '\n';
    }
    finish(os, path);
}

}  // namespace chaosfit
