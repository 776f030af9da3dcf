#include "nuhlab/orbits.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "nuhlab/cocycle.hpp"
#include "nuhlab/errors.hpp"
#include "nuhlab/parallel.hpp"

namespace nuhlab::billiard {

namespace {

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kOcclusionSlack = 1e-12;
constexpr double kDedupResolution = 1e-7;

// Unfolded disc centers Z_0..Z_{p-1} and the total translate C_p, so that Q_p = Q_0 + C_p.
struct Unfolded {
    std::vector<Vec2> centers;
    std::vector<double> radii;
    Vec2 total;
};

Unfolded unfold(const BilliardTable& table, const Itinerary& it) {
    Unfolded u;
    Vec2 offset{};
    for (const Symbol& s : it.symbols) {
        const Disc& d = table.disc(s.disc);
        u.centers.push_back(d.center + offset);
        u.radii.push_back(d.radius);
        offset += table.lattice().at(s.shift.m, s.shift.n);
    }
    u.total = offset;
    return u;
}

struct Frame {
    std::vector<Vec2> q;  // points Q_0..Q_p
    std::vector<Vec2> n;  // outward normals, n[p] = n[0]
};

Frame frame(const Unfolded& u, const std::vector<double>& r) {
    const std::size_t p = r.size();
    Frame f;
    for (std::size_t k = 0; k < p; ++k) {
        const double th = r[k] / u.radii[k];
        const Vec2 n{std::cos(th), std::sin(th)};
        f.n.push_back(n);
        f.q.push_back(u.centers[k] + n * u.radii[k]);
    }
    f.q.push_back(f.q[0] + u.total);
    f.n.push_back(f.n[0]);
    return f;
}

double total_length(const Unfolded& u, const std::vector<double>& r) {
    const Frame f = frame(u, r);
    double len = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) len += norm(f.q[k + 1] - f.q[k]);
    return len;
}

void derivatives(const Unfolded& u, const std::vector<double>& r, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
    const std::size_t p = r.size();
    const Frame f = frame(u, r);
    g.setZero(static_cast<Eigen::Index>(p));
    h.setZero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t k = 0; k < p; ++k) {
        const std::size_t k1 = (k + 1) % p;
        const Vec2 e = f.q[k + 1] - f.q[k];
        const double len = norm(e);
        const Vec2 uu = e / len;
        const Vec2 t0 = perp(f.n[k]);
        const Vec2 t1 = perp(f.n[k + 1]);
        const double a0 = dot(uu, t0);
        const double a1 = dot(uu, t1);
        const auto i0 = static_cast<Eigen::Index>(k);
        const auto i1 = static_cast<Eigen::Index>(k1);
        g(i0) -= a0;
        g(i1) += a1;
        h(i0, i0) += (1.0 - a0 * a0) / len + dot(uu, f.n[k]) / u.radii[k];
        h(i1, i1) += (1.0 - a1 * a1) / len - dot(uu, f.n[k + 1]) / u.radii[k1];
        const double cross_term = -(dot(t0, t1) - a0 * a1) / len;
        h(i0, i1) += cross_term;
        h(i1, i0) += cross_term;
    }
}

std::vector<std::pair<int, double>> signature(const BilliardTable& table, const std::vector<CollisionState>& pts) {
    std::vector<std::pair<int, double>> sig;
    for (const auto& s : pts) {
        double r = s.r;
        if (table.disc(s.disc).perimeter() - r < 1e-8) r = 0.0;
        sig.emplace_back(s.disc, r);
    }
    std::sort(sig.begin(), sig.end());
    return sig;
}

std::vector<std::pair<int, long long>> hash_key(const std::vector<std::pair<int, double>>& sig, double res) {
    std::vector<std::pair<int, long long>> key;
    for (const auto& [d, r] : sig) key.emplace_back(d, std::llround(r / res));
    return key;
}

bool same_signature(const std::vector<std::pair<int, double>>& a, const std::vector<std::pair<int, double>>& b,
                    double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].first != b[i].first || std::abs(a[i].second - b[i].second) > tol) return false;
    return true;
}

double arc_difference(double a, double b, double perimeter) {
    double d = std::fmod(std::abs(a - b), perimeter);
    return std::min(d, perimeter - d);
}

bool lattice_coords(const Lattice& lat, Vec2 v, long& m, long& n) {
    const RealMatrix2 basis{lat.b1.x, lat.b2.x, lat.b1.y, lat.b2.y};
    const Vec2 c = solve(basis, v);
    m = std::lround(c.x);
    n = std::lround(c.y);
    return std::abs(c.x - double(m)) < 1e-9 && std::abs(c.y - double(n)) < 1e-9;
}

}  // namespace

std::string Itinerary::to_string() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        if (k) os << ' ';
        os << symbols[k].disc << ':' << symbols[k].shift.m << ',' << symbols[k].shift.n;
    }
    return os.str();
}

Itinerary Itinerary::parse(const std::string& text) {
    Itinerary it;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        Symbol s;
        char c1 = 0, c2 = 0;
        std::istringstream ts(tok);
        if (!(ts >> s.disc >> c1 >> s.shift.m >> c2 >> s.shift.n) || c1 != ':' || c2 != ',')
            throw std::invalid_argument("bad itinerary symbol '" + tok + "'");
        it.symbols.push_back(s);
    }
    return it;
}

Itinerary rotated(const Itinerary& it, int k) {
    Itinerary out;
    const int p = it.period();
    for (int i = 0; i < p; ++i) out.symbols.push_back(it.symbols[static_cast<std::size_t>(((i + k) % p + p) % p)]);
    return out;
}

Itinerary reversed(const Itinerary& it) {
    Itinerary out;
    const int p = it.period();
    for (int i = 0; i < p; ++i) {
        const auto& d = it.symbols[static_cast<std::size_t>(p - 1 - i)];
        const auto& s = it.symbols[static_cast<std::size_t>(((p - 2 - i) % p + p) % p)];
        out.symbols.push_back({d.disc, -s.shift});
    }
    return out;
}

Itinerary canonical_form(const Itinerary& it) {
    Itinerary best = it;
    const Itinerary rev = reversed(it);
    for (int k = 0; k < it.period(); ++k) {
        for (const Itinerary* base : {&it, &rev}) {
            Itinerary c = rotated(*base, k);
            if (c.symbols < best.symbols) best = std::move(c);
        }
    }
    return best;
}

bool is_primitive(const Itinerary& it) {
    const int p = it.period();
    for (int k = 1; k < p; ++k)
        if (p % k == 0 && rotated(it, k) == it) return false;
    return true;
}

PeriodicOrbit solve_orbit(const BilliardTable& table, const Itinerary& itinerary, const SolveOptions& opt) {
    const int p = itinerary.period();
    if (p < 2) throw InvalidTable("itineraries need period >= 2");
    for (int k = 0; k < p; ++k) {
        const Symbol& s = itinerary.symbols[static_cast<std::size_t>(k)];
        const Symbol& next = itinerary.symbols[static_cast<std::size_t>((k + 1) % p)];
        if (s.disc < 0 || s.disc >= table.size()) throw InvalidTable("itinerary disc index out of range");
        if (next.disc == s.disc && s.shift.zero())
            throw InvalidTable("itinerary repeats a disc with zero shift at step " + std::to_string(k));
    }
    const Unfolded u = unfold(table, itinerary);
    const auto centre = [&](int k) {
        if (k < 0) return u.centers[static_cast<std::size_t>(p - 1)] - u.total;
        if (k >= p) return u.centers[0] + u.total;
        return u.centers[static_cast<std::size_t>(k)];
    };

    // Seed: each point faces the bisector of the directions to its neighbours' centers.
    std::vector<double> r(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) {
        const Vec2 a = normalized(centre(k - 1) - centre(k));
        const Vec2 b = normalized(centre(k + 1) - centre(k));
        Vec2 dir = a + b;
        if (norm(dir) < 1e-9) dir = perp(a);
        const double th = std::atan2(dir.y, dir.x);
        r[static_cast<std::size_t>(k)] = th * u.radii[static_cast<std::size_t>(k)];
    }

    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    bool converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
        derivatives(u, r, g, h);
        if (g.norm() < opt.gradient_tol) {
            converged = true;
            break;
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        Eigen::VectorXd step;
        bool newton = ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all();
        if (newton) {
            step = ldlt.solve(-g);
            newton = step.allFinite() && step.dot(g) < 0.0;
        }
        if (!newton) step = -g;
        const double len0 = total_length(u, r);
        double alpha = 1.0;
        std::vector<double> trial(r.size());
        const bool small = newton && step.norm() < 1e-6;
        while (true) {
            for (std::size_t k = 0; k < r.size(); ++k) trial[k] = r[k] + alpha * step(static_cast<Eigen::Index>(k));
            if (small || total_length(u, trial) <= len0 + 1e-4 * alpha * step.dot(g) || alpha < 1e-12) break;
            alpha *= 0.5;
        }
        r = trial;
    }
    if (!converged) {
        derivatives(u, r, g, h);
        if (!(g.norm() < opt.gradient_tol))
            throw NoConvergence("|grad L| = " + fmt_g(g.norm()) + " after " +
                                std::to_string(opt.max_iterations) + " steps for " + itinerary.to_string());
    }

    PeriodicOrbit orbit;
    orbit.itinerary = itinerary;
    orbit.gradient_norm = g.norm();
    const Frame f = frame(u, r);
    orbit.min_angle_gap = kHalfPi;
    for (int k = 0; k < p; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Vec2 out_dir = normalized(f.q[kk + 1] - f.q[kk]);
        const Vec2 prev = kk == 0 ? f.q[static_cast<std::size_t>(p - 1)] - u.total : f.q[kk - 1];
        const Vec2 in_dir = normalized(f.q[kk] - prev);
        const Vec2 n = f.n[kk];
        if (!(dot(in_dir, n) < 0.0 && dot(out_dir, n) > 0.0))
            throw Occluded("chord passes through disc " + std::to_string(itinerary.symbols[kk].disc) +
                           " at step " + std::to_string(k) + " of " + itinerary.to_string());
        const Vec2 mirrored = in_dir - n * (2.0 * dot(in_dir, n));
        orbit.reflection_error = std::max(orbit.reflection_error, norm(mirrored - out_dir));
        const CollisionState s = table.state_at(itinerary.symbols[kk].disc, n, out_dir);
        orbit.points.push_back(s);
        orbit.taus.push_back(norm(f.q[kk + 1] - f.q[kk]));
        orbit.min_angle_gap = std::min(orbit.min_angle_gap, kHalfPi - std::abs(s.phi));
    }

    // Obstacle-free chords.
    for (int k = 0; k < p; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const Symbol& s = itinerary.symbols[kk];
        const int next_disc = itinerary.symbols[(kk + 1) % static_cast<std::size_t>(p)].disc;
        const Vec2 a = f.q[kk];
        const Vec2 b = f.q[kk + 1];
        const Vec2 cell = u.centers[kk] - table.disc(s.disc).center;
        const double len = orbit.taus[kk];
        for (int j = 0; j < table.size(); ++j) {
            for (const LatticeShift& T : table.reachable_shifts(s.disc, j, len)) {
                if (j == s.disc && T.zero()) continue;
                if (j == next_disc && T == s.shift) continue;
                const Vec2 c = table.disc(j).center + cell + table.lattice().at(T.m, T.n);
                const Vec2 ab = b - a;
                const double lam = std::clamp(dot(c - a, ab) / dot(ab, ab), 0.0, 1.0);
                const double dist = norm(a + ab * lam - c);
                if (dist < table.disc(j).radius - kOcclusionSlack)
                    throw Occluded("chord " + std::to_string(k) + " of " + itinerary.to_string() +
                                   " crosses disc " + std::to_string(j));
            }
        }
    }

    // Closure certificate from the collision map itself.
    RealMatrix2 prod = RealMatrix2::identity();
    for (int k = 0; k < p; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const auto& from = orbit.points[kk];
        const auto& to = orbit.points[(kk + 1) % static_cast<std::size_t>(p)];
        const Collision c = collide(table, from);
        if (c.next.disc != to.disc || c.shift != itinerary.symbols[kk].shift)
            throw Occluded("collision map leaves the itinerary at step " + std::to_string(k) + " of " +
                           itinerary.to_string());
        const double per = table.disc(to.disc).perimeter();
        orbit.closure_error = std::max({orbit.closure_error, arc_difference(c.next.r, to.r, per),
                                        std::abs(c.next.phi - to.phi), std::abs(c.tau - orbit.taus[kk])});
        prod = derivative(table, from, to, orbit.taus[kk]) * prod;
    }
    orbit.trace = prod.trace();
    orbit.determinant = prod.det();
    const double disc = orbit.trace * orbit.trace - 4.0 * orbit.determinant;
    if (!(disc > 0.0)) throw NoConvergence("periodic orbit is not hyperbolic: " + itinerary.to_string());
    const double lam = (std::abs(orbit.trace) + std::sqrt(disc)) / 2.0;
    orbit.expansion_rate = std::log(lam) / p;
    return orbit;
}

OrbitDatabase enumerate_orbits(const BilliardTable& table, int max_period, int workers) {
    if (max_period < 2 || max_period > 8) throw std::invalid_argument("max period must lie in [2, 8]");
    OrbitDatabase db;
    db.max_period = max_period;

    std::vector<Itinerary> candidates;
    for (int p = 2; p <= max_period; ++p) {
        std::vector<Symbol> seq(static_cast<std::size_t>(p));
        // seq[k] gets its shift once disc k + 1 is chosen; seq[0] is the smallest symbol.
        const auto extend = [&](auto&& self, int k) -> void {
            const int from = seq[static_cast<std::size_t>(k)].disc;
            const bool last = k == p - 1;
            for (int to = last ? seq[0].disc : 0; to < (last ? seq[0].disc + 1 : table.size()); ++to) {
                for (const LatticeShift& T : table.flight_shifts(from, to)) {
                    seq[static_cast<std::size_t>(k)].shift = T;
                    if (k > 0 && seq[static_cast<std::size_t>(k)] < seq[0]) continue;
                    if (last) {
                        Itinerary it{seq};
                        if (is_primitive(it) && canonical_form(it) == it) candidates.push_back(std::move(it));
                        continue;
                    }
                    seq[static_cast<std::size_t>(k) + 1].disc = to;
                    seq[static_cast<std::size_t>(k) + 1].shift = {};
                    if (seq[static_cast<std::size_t>(k) + 1].disc < seq[0].disc) continue;
                    self(self, k + 1);
                }
            }
        };
        for (int d0 = 0; d0 < table.size(); ++d0) {
            seq[0] = {d0, {}};
            extend(extend, 0);
        }
    }
    db.itineraries = static_cast<long>(candidates.size());

    std::vector<std::optional<PeriodicOrbit>> solved(candidates.size());
    std::vector<EnumerationFailure> failed(candidates.size());
    parallel_for(candidates.size(), workers, [&](std::size_t i) {
        try {
            solved[i] = solve_orbit(table, candidates[i]);
        } catch (const Error& e) {
            failed[i] = {candidates[i], e.kind(), e.what()};
        }
    });

    std::map<std::vector<std::pair<int, long long>>, std::size_t> seen;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!solved[i]) {
            db.failures.push_back(std::move(failed[i]));
            continue;
        }
        const auto key = hash_key(signature(table, solved[i]->points), kDedupResolution);
        if (seen.emplace(key, db.orbits.size()).second) db.orbits.push_back(std::move(*solved[i]));
    }
    return db;
}

std::vector<TableSymmetry> table_symmetries(const BilliardTable& table) {
    const Lattice& lat = table.lattice();
    std::vector<RealMatrix2> linear;
    for (int k = 0; k < 12; ++k) {
        const double a = std::numbers::pi * k / 6.0;
        linear.push_back({std::cos(a), -std::sin(a), std::sin(a), std::cos(a)});
        linear.push_back({std::cos(a), std::sin(a), std::sin(a), -std::cos(a)});  // mirror at angle a / 2
    }
    std::vector<TableSymmetry> out;
    for (const RealMatrix2& A : linear) {
        long m = 0, n = 0;
        if (!lattice_coords(lat, A * lat.b1, m, n) || !lattice_coords(lat, A * lat.b2, m, n)) continue;
        const RealMatrix2 Ainv = A.inverse();
        if (!lattice_coords(lat, Ainv * lat.b1, m, n) || !lattice_coords(lat, Ainv * lat.b2, m, n)) continue;
        for (int j = 0; j < table.size(); ++j) {
            const Vec2 t = table.disc(j).center - A * table.disc(0).center;
            TableSymmetry g{A, t, std::vector<int>(static_cast<std::size_t>(table.size()), -1)};
            bool ok = true;
            for (int i = 0; i < table.size() && ok; ++i) {
                const Vec2 y = A * table.disc(i).center + t;
                ok = false;
                for (int k = 0; k < table.size(); ++k) {
                    if (std::abs(table.disc(k).radius - table.disc(i).radius) > 1e-12) continue;
                    if (lattice_coords(lat, y - table.disc(k).center, m, n)) {
                        g.disc_map[static_cast<std::size_t>(i)] = k;
                        ok = true;
                        break;
                    }
                }
            }
            if (ok) out.push_back(std::move(g));
        }
    }
    return out;
}

CollisionState apply_symmetry(const BilliardTable& table, const TableSymmetry& g, const CollisionState& s) {
    const Vec2 n = g.linear * table.outward_normal(s);
    const Vec2 v = g.linear * table.velocity(s);
    return table.state_at(g.disc_map[static_cast<std::size_t>(s.disc)], normalized(n), normalized(v));
}

std::vector<int> symmetry_classes(const BilliardTable& table, const std::vector<PeriodicOrbit>& orbits) {
    std::vector<int> parent(orbits.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    const auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    std::vector<std::vector<std::pair<int, double>>> sigs;
    std::map<std::vector<std::pair<int, long long>>, std::size_t> index;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        sigs.push_back(signature(table, orbits[i].points));
        index.emplace(hash_key(sigs.back(), 1e-6), i);
    }
    const auto symmetries = table_symmetries(table);
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        for (const auto& g : symmetries) {
            std::vector<CollisionState> image;
            for (const auto& s : orbits[i].points) image.push_back(apply_symmetry(table, g, s));
            const auto sig = signature(table, image);
            std::optional<std::size_t> match;
            if (auto it = index.find(hash_key(sig, 1e-6)); it != index.end() && same_signature(sigs[it->second], sig, 1e-6))
                match = it->second;
            else
                for (std::size_t j = 0; j < orbits.size() && !match; ++j)
                    if (same_signature(sigs[j], sig, 1e-6)) match = j;
            if (match) {
                const int a = find(static_cast<int>(i));
                const int b = find(static_cast<int>(*match));
                if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
            }
        }
    }
    // Relabel roots densely in order of first appearance.
    std::vector<int> label(orbits.size(), -1);
    std::vector<int> out(orbits.size());
    int next = 0;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        const int root = find(static_cast<int>(i));
        if (label[static_cast<std::size_t>(root)] < 0) label[static_cast<std::size_t>(root)] = next++;
        out[i] = label[static_cast<std::size_t>(root)];
    }
    return out;
}

MmeReport mme_criterion_report(const BilliardTable& table, const OrbitDatabase& db, double delta_graze) {
    MmeReport rep;
    rep.max_period = db.max_period;
    rep.failures = static_cast<long>(db.failures.size());
    rep.log_Lambda = std::log(min_expansion_Lambda(table));
    rep.count_by_period.assign(static_cast<std::size_t>(db.max_period) + 1, 0);
    const auto classes = symmetry_classes(table, db.orbits);
    std::map<int, std::pair<double, double>> class_range;
    double sum = 0.0;
    long used = 0;
    rep.min_rate = std::numeric_limits<double>::infinity();
    rep.max_rate = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < db.orbits.size(); ++i) {
        const auto& o = db.orbits[i];
        MmeRow row{o.itinerary.to_string(), o.period(), o.expansion_rate, o.min_angle_gap, classes[i],
                   o.non_grazing(delta_graze)};
        rep.rows.push_back(row);
        ++rep.count_by_period[static_cast<std::size_t>(o.period())];
        if (o.expansion_rate < rep.log_Lambda) rep.all_above_log_Lambda = false;
        auto [it, fresh] = class_range.emplace(classes[i], std::make_pair(o.expansion_rate, o.expansion_rate));
        if (!fresh) {
            it->second.first = std::min(it->second.first, o.expansion_rate);
            it->second.second = std::max(it->second.second, o.expansion_rate);
        }
        if (!row.non_grazing) continue;
        sum += o.expansion_rate;
        ++used;
        rep.min_rate = std::min(rep.min_rate, o.expansion_rate);
        rep.max_rate = std::max(rep.max_rate, o.expansion_rate);
    }
    rep.no_data = used == 0;
    if (rep.no_data) {
        rep.min_rate = rep.max_rate = 0.0;
        return rep;
    }
    rep.mean_rate = sum / double(used);
    rep.spread = rep.max_rate - rep.min_rate;
    for (const auto& [id, range] : class_range) rep.max_class_spread = std::max(rep.max_class_spread, range.second - range.first);
    long cumulative = 0;
    for (int p = 1; p <= db.max_period; ++p) {
        cumulative += rep.count_by_period[static_cast<std::size_t>(p)];
        if (cumulative > 0) rep.entropy_lower_proxy = std::max(rep.entropy_lower_proxy, std::log(double(cumulative)) / p);
    }
    return rep;
}

MmeReport mme_criterion_report(const BilliardTable& table, int max_period, int workers, double delta_graze) {
    return mme_criterion_report(table, enumerate_orbits(table, max_period, workers), delta_graze);
}

PressureCheck pressure_zero_check(const BilliardTable& table, CollisionState start, long n_steps,
                                  std::mt19937_64& rng, PotentialDirection direction, long burn_in) {
    if (n_steps < 100000) throw std::invalid_argument("pressure check needs n_steps >= 1e5");
    const long total = n_steps + burn_in;
    std::vector<CollisionState> states;
    std::vector<double> taus;
    std::vector<RealMatrix2> jacobians;
    std::vector<char> valid;
    states.reserve(static_cast<std::size_t>(total) + 1);
    states.push_back(start);
    PressureCheck out;
    out.steps = n_steps;
    for (long k = 0; k < total; ++k) {
        const Collision c = collide(table, states.back());
        taus.push_back(c.tau);
        try {
            jacobians.push_back(derivative(table, states.back(), c.next, c.tau));
            valid.push_back(1);
        } catch (const NearGrazing&) {
            jacobians.push_back(RealMatrix2::identity());
            valid.push_back(0);
            ++out.skipped;
        }
        states.push_back(c.next);
    }

    // Potential: p-metric expansion of E^u (carried forward) or E^s (carried backward).
    std::vector<double> minus_phi(static_cast<std::size_t>(total), 0.0);
    if (direction == PotentialDirection::Unstable) {
        double v = table.disc(start.disc).curvature();
        for (long k = 0; k < total; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            if (!valid[kk]) {
                v = table.disc(states[kk + 1].disc).curvature();
                continue;
            }
            minus_phi[kk] = std::log(p_metric_expansion(table, states[kk], v, taus[kk]));
            v = push_slope(jacobians[kk], v);
        }
    } else {
        double v = -table.disc(states.back().disc).curvature();
        for (long k = total - 1; k >= 0; --k) {
            const auto kk = static_cast<std::size_t>(k);
            if (!valid[kk]) {
                v = -table.disc(states[kk].disc).curvature();
                continue;
            }
            v = push_slope(jacobians[kk].inverse(), v);
            const RealMatrix2& j = jacobians[kk];
            minus_phi[kk] = std::log(std::abs(j.a + j.b * v) * std::cos(states[kk + 1].phi) / std::cos(states[kk].phi));
        }
    }
    double sum = 0.0;
    long count = 0;
    const long lo = direction == PotentialDirection::Unstable ? burn_in : 0;
    for (long k = lo; k < lo + n_steps; ++k) {
        if (!valid[static_cast<std::size_t>(k)]) continue;
        sum += minus_phi[static_cast<std::size_t>(k)];
        ++count;
    }
    out.birkhoff_minus_phi = sum / double(count);

    std::size_t cursor = 0;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double a = angle(rng);
    const auto next = [&] {
        while (!valid[cursor]) ++cursor;
        return jacobians[cursor++];
    };
    cocycle::QrOptions opt;
    opt.burn_in = burn_in;
    const auto est = cocycle::lyapunov_from_jacobians(next, n_steps - out.skipped, {std::cos(a), std::sin(a)}, opt);
    out.lambda_plus = est.exponents[0];
    out.lambda_ci = est.halfwidths[0];
    out.residual = std::abs(out.birkhoff_minus_phi - out.lambda_plus);
    return out;
}

}  // namespace nuhlab::billiard
