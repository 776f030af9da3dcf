#include "nuhlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nuhlab::stats {

double student_t975(int dof) {
    static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                       2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                       2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                       2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    if (dof < 1) throw std::invalid_argument("t quantile needs dof >= 1");
    if (dof <= 30) return table[dof - 1];
    return 1.959964 + 2.37 / dof;
}

MeanCI batch_means(std::span<const double> xs, int batches) {
    if (batches < 2 || xs.size() < static_cast<std::size_t>(batches))
        throw std::invalid_argument("batch means needs at least `batches` samples");
    const std::size_t len = xs.size() / static_cast<std::size_t>(batches);
    std::vector<double> means(static_cast<std::size_t>(batches));
    double total = 0.0;
    for (int b = 0; b < batches; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * len;
        const std::size_t hi = b + 1 == batches ? xs.size() : lo + len;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += xs[i];
        total += s;
        means[static_cast<std::size_t>(b)] = s / double(hi - lo);
    }
    MeanCI out;
    out.mean = total / double(xs.size());
    double bm = 0.0;
    for (double m : means) bm += m;
    bm /= batches;
    double var = 0.0;
    for (double m : means) var += (m - bm) * (m - bm);
    var /= batches - 1;
    out.halfwidth = student_t975(batches - 1) * std::sqrt(var / batches);
    return out;
}

MeanCI mean_ci(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("mean_ci needs at least two samples");
    double m = 0.0;
    for (double x : xs) m += x;
    m /= double(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    var /= double(xs.size() - 1);
    return {m, 1.959964 * std::sqrt(var / double(xs.size()))};
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs >= 2 points");
    const double n = double(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("least squares needs two distinct x values");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = q * double(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - double(lo)) * (xs[hi] - xs[lo]);
}

BirkhoffTail birkhoff_tail(std::span<const double> xs) {
    BirkhoffTail out;
    out.n = static_cast<long>(xs.size());
    if (xs.empty()) return out;
    std::vector<double> running(xs.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sum += xs[k];
        running[k] = sum / static_cast<double>(k + 1);
    }
    out.mean = running.back();
    const std::size_t from = std::max<std::size_t>(xs.size() / 10, 1) - 1;
    for (std::size_t k = from; k < xs.size(); ++k) out.cauchy_tail = std::max(out.cauchy_tail, std::abs(running[k] - out.mean));
    return out;
}

}  // namespace nuhlab::stats
