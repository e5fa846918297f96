#pragma once

// Direct transcriptions of the test statistics on plain nested vectors.
// Nothing here calls into the library, so these serve as independent
// references for the Eigen-based implementation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;

inline std::size_t rows(const Grid& y) { return y.size(); }
inline std::size_t cols(const Grid& y) { return y.front().size(); }

inline Grid random_grid(std::size_t a, std::size_t b, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, scale);
    Grid y(a, std::vector<double>(b));
    for (auto& row : y)
        for (auto& v : row) v = nd(gen);
    return y;
}

struct Means {
    double grand = 0.0;
    std::vector<double> row;  // ybar_i.
    std::vector<double> col;  // ybar_.j
};

inline Means means(const Grid& y) {
    const std::size_t a = rows(y), b = cols(y);
    Means m;
    m.row.assign(a, 0.0);
    m.col.assign(b, 0.0);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            m.row[i] += y[i][j] / static_cast<double>(b);
            m.col[j] += y[i][j] / static_cast<double>(a);
            m.grand += y[i][j] / static_cast<double>(a * b);
        }
    return m;
}

inline Grid residuals(const Grid& y) {
    const Means m = means(y);
    Grid r = y;
    for (std::size_t i = 0; i < rows(y); ++i)
        for (std::size_t j = 0; j < cols(y); ++j) r[i][j] = y[i][j] - m.row[i] - m.col[j] + m.grand;
    return r;
}

inline double sum_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline std::vector<double> row_effects(const Grid& y) {
    const Means m = means(y);
    std::vector<double> a(m.row);
    for (double& v : a) v -= m.grand;
    return a;
}

inline std::vector<double> col_effects(const Grid& y) {
    const Means m = means(y);
    std::vector<double> b(m.col);
    for (double& v : b) v -= m.grand;
    return b;
}

inline double rss0(const Grid& y) {
    double s = 0.0;
    for (const auto& row : residuals(y))
        for (double v : row) s += v * v;
    return s;
}

// Tukey: MS_int / MS_error exactly as printed, using y_ij in the cross sum.
inline double tukey(const Grid& y) {
    const std::size_t a = rows(y), b = cols(y);
    const Means m = means(y);
    double cross = 0.0, sa = 0.0, sb = 0.0, total = 0.0;
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            cross += y[i][j] * (m.row[i] - m.grand) * (m.col[j] - m.grand);
            total += (y[i][j] - m.grand) * (y[i][j] - m.grand);
        }
    for (std::size_t i = 0; i < a; ++i) sa += (m.row[i] - m.grand) * (m.row[i] - m.grand);
    for (std::size_t j = 0; j < b; ++j) sb += (m.col[j] - m.grand) * (m.col[j] - m.grand);
    const double ms_int = cross * cross / (sa * sb);
    const double ms_err = (total - static_cast<double>(a) * sb - static_cast<double>(b) * sa - ms_int) /
                          static_cast<double>((a - 1) * (b - 1) - 1);
    return ms_int / ms_err;
}

inline double tukey_ms_int(const Grid& y) {
    const Means m = means(y);
    double cross = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < rows(y); ++i)
        for (std::size_t j = 0; j < cols(y); ++j) cross += y[i][j] * (m.row[i] - m.grand) * (m.col[j] - m.grand);
    for (double v : m.row) sa += (v - m.grand) * (v - m.grand);
    for (double v : m.col) sb += (v - m.grand) * (v - m.grand);
    return cross * cross / (sa * sb);
}

// Mandel: rows regressed on column means, with (a-1)(b-2) in the error divisor.
inline double mandel(const Grid& y) {
    const std::size_t a = rows(y), b = cols(y);
    const Means m = means(y);
    double sb = 0.0;
    for (std::size_t j = 0; j < b; ++j) sb += (m.col[j] - m.grand) * (m.col[j] - m.grand);
    std::vector<double> z(a, 0.0);
    for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = 0; j < b; ++j) z[i] += y[i][j] * (m.col[j] - m.grand);
        z[i] /= sb;
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a; ++i) num += (z[i] - 1.0) * (z[i] - 1.0);
    num = num * sb / static_cast<double>(a - 1);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            const double d = (y[i][j] - m.row[i]) - z[i] * (m.col[j] - m.grand);
            den += d * d;
        }
    den /= static_cast<double>((a - 1) * (b - 2));
    return num / den;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
inline std::vector<double> jacobi_eigenvalues(Grid s) {
    const std::size_t n = s.size();
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += s[p][q] * s[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(s[p][q]) < 1e-300) continue;
                const double theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s[k][p], skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s[p][k], sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = s[i][i];
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

// Always factors the a x a matrix R R^T, whatever the shape.
inline std::vector<double> kappa(const Grid& y) {
    const Grid r = residuals(y);
    const std::size_t a = rows(y), b = cols(y);
    Grid g(a, std::vector<double>(a, 0.0));
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t k = 0; k < a; ++k)
            for (std::size_t j = 0; j < b; ++j) g[i][k] += r[i][j] * r[k][j];
    std::vector<double> ev = jacobi_eigenvalues(g);
    ev.resize(std::min(a, b) - 1);
    for (double& v : ev) v = std::max(v, 0.0);
    return ev;
}

inline std::vector<double> omega(const Grid& y) {
    std::vector<double> k = kappa(y);
    double total = 0.0;
    for (double v : k) total += v;
    for (double& v : k) v /= total;
    return k;
}

inline double johnson_graybill(const Grid& y) { return omega(y).front(); }
inline double lbi(const Grid& y) { return sum_sq(omega(y)); }
inline double tusell(const Grid& y) {
    double p = 1.0;
    for (double v : omega(y)) p *= v;
    return p;
}

struct ModifiedFit {
    double k0 = 0.0;
    double k1 = 0.0;
    std::vector<double> alpha1, beta1;
    double rss0 = 0.0;
    double rss = 0.0;
    double f = 0.0;
};

// One sequential pass of the printed update formulas (alpha, beta, k), each
// using the newest values available.
inline ModifiedFit modified(const Grid& y) {
    const std::size_t a = rows(y), b = cols(y);
    const Means m = means(y);
    const double mu = m.grand;
    std::vector<double> al = row_effects(y), be = col_effects(y);

    auto slope = [&](const std::vector<double>& A, const std::vector<double>& B) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < a; ++i)
            for (std::size_t j = 0; j < b; ++j) {
                num += (y[i][j] - A[i] - B[j] - mu) * A[i] * B[j];
                den += A[i] * A[i] * B[j] * B[j];
            }
        return num / den;
    };

    ModifiedFit out;
    out.k0 = slope(al, be);
    std::vector<double> al1(a), be1(b);
    for (std::size_t i = 0; i < a; ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < b; ++j) {
            const double w = 1.0 + out.k0 * be[j];
            num += (y[i][j] - mu - be[j]) * w;
            den += w * w;
        }
        al1[i] = num / den;
    }
    for (std::size_t j = 0; j < b; ++j) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < a; ++i) {
            const double w = 1.0 + out.k0 * al1[i];
            num += (y[i][j] - mu - al1[i]) * w;
            den += w * w;
        }
        be1[j] = num / den;
    }
    out.k1 = slope(al1, be1);
    out.alpha1 = al1;
    out.beta1 = be1;
    out.rss0 = rss0(y);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            const double e = y[i][j] - mu - al1[i] - be1[j] - out.k1 * al1[i] * be1[j];
            out.rss += e * e;
        }
    const double dof = static_cast<double>(a * b - a - b);
    out.f = (out.rss0 - out.rss) / (out.rss / dof);
    return out;
}

// k0 in its simplified form: sum y_ij alpha_i beta_j / (sum alpha^2 sum beta^2).
inline double k0_simplified(const Grid& y) {
    const auto al = row_effects(y), be = col_effects(y);
    double num = 0.0;
    for (std::size_t i = 0; i < rows(y); ++i)
        for (std::size_t j = 0; j < cols(y); ++j) num += y[i][j] * al[i] * be[j];
    return num / (sum_sq(al) * sum_sq(be));
}

// Unconstrained least squares for mu + alpha_i + beta_j with sum-to-zero
// coding, solved by Gaussian elimination on the normal equations.
struct BruteAdditive {
    double mu = 0.0;
    std::vector<double> alpha, beta;
};

inline BruteAdditive brute_force_additive(const Grid& y) {
    const std::size_t a = rows(y), b = cols(y);
    const std::size_t p = 1 + (a - 1) + (b - 1);
    std::vector<std::vector<double>> xtx(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            std::vector<double> x(p, 0.0);
            x[0] = 1.0;
            for (std::size_t r = 0; r + 1 < a; ++r) x[1 + r] = (i == r) ? 1.0 : (i == a - 1 ? -1.0 : 0.0);
            for (std::size_t c = 0; c + 1 < b; ++c) x[a + c] = (j == c) ? 1.0 : (j == b - 1 ? -1.0 : 0.0);
            for (std::size_t u = 0; u < p; ++u) {
                for (std::size_t v = 0; v < p; ++v) xtx[u][v] += x[u] * x[v];
                xtx[u][p] += x[u] * y[i][j];
            }
        }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::abs(xtx[r][c]) > std::abs(xtx[piv][c])) piv = r;
        std::swap(xtx[c], xtx[piv]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const double f = xtx[r][c] / xtx[c][c];
            for (std::size_t k = c; k <= p; ++k) xtx[r][k] -= f * xtx[c][k];
        }
    }
    std::vector<double> theta(p);
    for (std::size_t c = 0; c < p; ++c) theta[c] = xtx[c][p] / xtx[c][c];
    BruteAdditive out;
    out.mu = theta[0];
    double last = 0.0;
    for (std::size_t r = 0; r + 1 < a; ++r) {
        out.alpha.push_back(theta[1 + r]);
        last -= theta[1 + r];
    }
    out.alpha.push_back(last);
    last = 0.0;
    for (std::size_t c = 0; c + 1 < b; ++c) {
        out.beta.push_back(theta[a + c]);
        last -= theta[a + c];
    }
    out.beta.push_back(last);
    return out;
}

inline double rel_diff(double x, double ref) {
    if (x == ref) return 0.0;
    return std::abs(x - ref) / std::max(std::abs(ref), 1e-300);
}

}  // namespace oracle
