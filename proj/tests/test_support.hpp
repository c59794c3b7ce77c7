#pragma once

// Test-side oracles, independent of the library's execution paths: dense
// matrix algebra for gate checks and an exhaustive paging optimum.

#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

namespace testsupport {

using Complex = std::complex<double>;
using Matrix = std::vector<std::vector<Complex>>;  // row-major, square

inline Matrix identity(std::size_t n) {
    Matrix m(n, std::vector<Complex>(n, Complex{0, 0}));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = Complex{1, 0};
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    const std::size_t ra = a.size(), rb = b.size();
    Matrix m(ra * rb, std::vector<Complex>(ra * rb, Complex{0, 0}));
    for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < ra; ++j)
            for (std::size_t k = 0; k < rb; ++k)
                for (std::size_t l = 0; l < rb; ++l)
                    m[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
    return m;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    Matrix m(n, std::vector<Complex>(n, Complex{0, 0}));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) m[i][j] += a[i][k] * b[k][j];
    return m;
}

inline std::vector<Complex> matvec(const Matrix& a, const std::vector<Complex>& v) {
    std::vector<Complex> out(v.size(), Complex{0, 0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) out[i] += a[i][j] * v[j];
    return out;
}

inline Matrix dagger(const Matrix& a) {
    const std::size_t n = a.size();
    Matrix m(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = std::conj(a[j][i]);
    return m;
}

inline Matrix from_flat(const std::vector<Complex>& flat, std::size_t n) {
    Matrix m(n, std::vector<Complex>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = flat[i * n + j];
    return m;
}

// Lifts a gate matrix to a register: single target or control/target pair,
// with qubit 0 as the most significant ket position.
inline Matrix lift_single(const Matrix& u, int target, int num_qubits) {
    Matrix m = identity(1);
    for (int q = 0; q < num_qubits; ++q) {
        m = kron(m, q == target ? u : identity(2));
    }
    return m;
}

inline Matrix lift_controlled(const Matrix& u, int control, int target, int num_qubits) {
    // P0/P1 projectors on the control, identity/u on the target.
    const Matrix p0 = {{Complex{1, 0}, {}}, {{}, Complex{0, 0}}};
    const Matrix p1 = {{Complex{0, 0}, {}}, {{}, Complex{1, 0}}};
    Matrix keep = identity(1);
    Matrix act = identity(1);
    for (int q = 0; q < num_qubits; ++q) {
        keep = kron(keep, q == control ? p0 : identity(2));
        act = kron(act, q == control ? p1 : (q == target ? u : identity(2)));
    }
    Matrix m = keep;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) m[i][j] += act[i][j];
    return m;
}

// Exhaustive minimum fault count over all eviction schedules, memoized on
// (position, cache contents). Pages are ids in [1, N], N small.
inline int brute_force_min_faults(int cache_size, const std::vector<int>& requests) {
    std::map<std::pair<std::size_t, std::set<int>>, int> memo;
    struct Solver {
        int cache_size;
        const std::vector<int>& requests;
        std::map<std::pair<std::size_t, std::set<int>>, int>& memo;

        int solve(std::size_t pos, std::set<int> cache) {
            if (pos == requests.size()) return 0;
            const auto key = std::make_pair(pos, cache);
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
            const int page = requests[pos];
            int best;
            if (cache.count(page)) {
                best = solve(pos + 1, cache);
            } else if (static_cast<int>(cache.size()) < cache_size) {
                auto next = cache;
                next.insert(page);
                best = 1 + solve(pos + 1, std::move(next));
            } else {
                best = 1 << 30;
                for (int victim : cache) {
                    auto next = cache;
                    next.erase(victim);
                    next.insert(page);
                    best = std::min(best, 1 + solve(pos + 1, std::move(next)));
                }
            }
            memo[key] = best;
            return best;
        }
    } solver{cache_size, requests, memo};
    return solver.solve(0, {});
}

}  // namespace testsupport
