#ifndef RECON_LDPC_HPP
#define RECON_LDPC_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "recon/bits.hpp"
#include "recon/rational.hpp"

namespace recon {

// Binary entropy in bits, with the convention 0*log2(0) = 0.
// Throws std::domain_error outside [0,1].
double binary_entropy(double q);

// Sparse binary parity-check matrix, stored as one sorted column-index set
// per check row. Immutable after construction and safe for shared reads.
class ParityCheckMatrix {
  public:
    // Validates: indices in range, rows non-empty, no duplicates within a row,
    // every column covered, and the rate (n_cols - n_rows)/n_cols an exact
    // multiple of 1/20.
    ParityCheckMatrix(int n_cols, std::vector<std::vector<int>> rows);

    int cols() const { return n_cols_; }
    int checks() const { return static_cast<int>(rows_.size()); }
    Rational rate() const { return rate_; }

    const std::vector<int>& row(int j) const { return rows_[static_cast<std::size_t>(j)]; }
    const std::vector<std::vector<int>>& rows() const { return rows_; }
    // Check rows incident to each column, sorted ascending.
    const std::vector<std::vector<int>>& cols_adjacency() const { return cols_; }

    bool operator==(const ParityCheckMatrix& other) const {
        return n_cols_ == other.n_cols_ && rows_ == other.rows_;
    }

  private:
    int n_cols_;
    std::vector<std::vector<int>> rows_;
    std::vector<std::vector<int>> cols_;
    Rational rate_;
};

// s[j] = XOR of key bits at the column indices of row j.
Bits compute_syndrome(const Bits& key, const ParityCheckMatrix& H);

// Column-degree fractions for matrix generation. Fractions must be
// non-negative and sum to 1 within 1e-9; degrees must be >= 2.
class DegreeDistribution {
  public:
    explicit DegreeDistribution(std::map<int, double> fractions);

    const std::map<int, double>& fractions() const { return fractions_; }
    int max_degree() const { return fractions_.rbegin()->first; }

    // Column-degree counts for n columns, rounded by the largest-remainder
    // rule (remainder ties broken toward the smaller degree).
    std::vector<int> realize_counts(int n_cols) const;

    bool operator==(const DegreeDistribution&) const = default;

  private:
    std::map<int, double> fractions_;
};

// Progressive edge growth. Column degrees realize `dist`; the seed permutes
// the degree-to-column assignment; every edge goes to the candidate row at
// maximal graph distance from the column (unreached rows first), ties broken
// by lowest current row degree, then lowest row index. Same seed, same matrix.
ParityCheckMatrix peg_generate(int n_cols, int n_rows, const DegreeDistribution& dist,
                               std::uint64_t seed);

// alist interchange (MacKay convention): "n_cols n_rows", max degrees,
// per-column and per-row degree lists, then 1-based index lists, zero-padded.
ParityCheckMatrix load_alist(const std::filesystem::path& path);
void save_alist(const ParityCheckMatrix& H, const std::filesystem::path& path);

// The nine-code pool, rates 0.50 .. 0.90 in steps of 0.05, equal frame length.
class CodePool {
  public:
    static const std::vector<Rational>& standard_rates();  // descending

    // Generate all nine codes with PEG; per-rate seeds derive from `seed`.
    static CodePool generate(int n_fr, const std::map<Rational, DegreeDistribution>& dists,
                             std::uint64_t seed);
    // Directory of files named by rate with two decimals, e.g. "r0.90.alist".
    static CodePool load_directory(const std::filesystem::path& dir);
    void save_directory(const std::filesystem::path& dir) const;

    int frame_length() const { return n_fr_; }
    const ParityCheckMatrix& at(Rational rate) const;
    std::vector<Rational> rates() const;  // descending

  private:
    explicit CodePool(int n_fr, std::map<Rational, ParityCheckMatrix> codes);

    int n_fr_;
    std::map<Rational, ParityCheckMatrix> codes_;
};

// Shipped default irregular distributions, one per pool rate. Mirrors
// data/degree_distributions.json.
std::map<Rational, DegreeDistribution> default_degree_distributions();
// Load the same mapping from a JSON file ({"0.90": {"3": 0.7, ...}, ...}).
std::map<Rational, DegreeDistribution> load_degree_distributions(const std::filesystem::path& path);

}  // namespace recon

#endif
