#include "recon/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace recon {

double binary_entropy(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("binary_entropy: q outside [0,1]");
    if (q == 0.0 || q == 1.0) return 0.0;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

ParityCheckMatrix::ParityCheckMatrix(int n_cols, std::vector<std::vector<int>> rows)
    : n_cols_(n_cols), rows_(std::move(rows)) {
    if (n_cols_ <= 0) throw std::invalid_argument("ParityCheckMatrix: n_cols must be positive");
    if (rows_.empty()) throw std::invalid_argument("ParityCheckMatrix: no rows");
    const int n_rows = static_cast<int>(rows_.size());
    if (n_rows >= n_cols_) throw std::invalid_argument("ParityCheckMatrix: n_rows must be < n_cols");

    cols_.assign(static_cast<std::size_t>(n_cols_), {});
    for (int j = 0; j < n_rows; ++j) {
        auto& r = rows_[static_cast<std::size_t>(j)];
        if (r.empty()) throw std::invalid_argument("ParityCheckMatrix: empty row " + std::to_string(j));
        std::sort(r.begin(), r.end());
        for (std::size_t k = 0; k < r.size(); ++k) {
            int c = r[k];
            if (c < 0 || c >= n_cols_)
                throw std::invalid_argument("ParityCheckMatrix: column index out of range in row " +
                                            std::to_string(j));
            if (k > 0 && r[k - 1] == c)
                throw std::invalid_argument("ParityCheckMatrix: duplicate column in row " +
                                            std::to_string(j));
            cols_[static_cast<std::size_t>(c)].push_back(j);
        }
    }
    for (int c = 0; c < n_cols_; ++c)
        if (cols_[static_cast<std::size_t>(c)].empty())
            throw std::invalid_argument("ParityCheckMatrix: column " + std::to_string(c) +
                                        " participates in no row");

    // Rate must be an exact multiple of 1/20 so frame geometry stays integral.
    if ((static_cast<std::int64_t>(n_cols_ - n_rows) * 20) % n_cols_ != 0)
        throw std::invalid_argument("ParityCheckMatrix: rate is not a multiple of 1/20");
    rate_ = Rational(n_cols_ - n_rows, n_cols_);
}

Bits compute_syndrome(const Bits& key, const ParityCheckMatrix& H) {
    if (static_cast<int>(key.size()) != H.cols())
        throw std::invalid_argument("compute_syndrome: key length != n_cols");
    Bits s(static_cast<std::size_t>(H.checks()), 0);
    for (int j = 0; j < H.checks(); ++j) {
        std::uint8_t acc = 0;
        for (int c : H.row(j)) acc ^= key[static_cast<std::size_t>(c)];
        s[static_cast<std::size_t>(j)] = acc;
    }
    return s;
}

DegreeDistribution::DegreeDistribution(std::map<int, double> fractions)
    : fractions_(std::move(fractions)) {
    if (fractions_.empty()) throw std::invalid_argument("DegreeDistribution: empty");
    double sum = 0.0;
    for (const auto& [deg, frac] : fractions_) {
        if (deg < 2) throw std::invalid_argument("DegreeDistribution: degrees must be >= 2");
        if (frac < 0.0) throw std::invalid_argument("DegreeDistribution: negative fraction");
        sum += frac;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("DegreeDistribution: fractions must sum to 1");
}

std::vector<int> DegreeDistribution::realize_counts(int n_cols) const {
    std::vector<int> counts;
    std::vector<std::pair<double, int>> remainders;  // (remainder, slot)
    int assigned = 0, slot = 0;
    for (const auto& [deg, frac] : fractions_) {
        double exact = frac * n_cols;
        int base = static_cast<int>(std::floor(exact));
        counts.push_back(base);
        assigned += base;
        remainders.emplace_back(exact - base, slot++);
    }
    // Largest remainder first; ties toward the smaller degree (lower slot).
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int i = 0; i < n_cols - assigned; ++i)
        counts[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i)].second)]++;
    return counts;
}

namespace {

// Distances from column `c` to every check row in the current bipartite graph;
// -1 marks unreached rows. Expansion stops once no new row appears.
void row_distances(int c, const std::vector<std::vector<int>>& col_rows,
                   const std::vector<std::vector<int>>& row_cols, std::vector<int>& depth,
                   std::vector<int>& col_seen, int stamp) {
    std::fill(depth.begin(), depth.end(), -1);
    std::vector<int> frontier_rows;
    for (int r : col_rows[static_cast<std::size_t>(c)]) {
        depth[static_cast<std::size_t>(r)] = 1;
        frontier_rows.push_back(r);
    }
    col_seen[static_cast<std::size_t>(c)] = stamp;
    int level = 1;
    while (!frontier_rows.empty()) {
        std::vector<int> next_rows;
        for (int r : frontier_rows) {
            for (int cc : row_cols[static_cast<std::size_t>(r)]) {
                if (col_seen[static_cast<std::size_t>(cc)] == stamp) continue;
                col_seen[static_cast<std::size_t>(cc)] = stamp;
                for (int rr : col_rows[static_cast<std::size_t>(cc)]) {
                    if (depth[static_cast<std::size_t>(rr)] < 0) {
                        depth[static_cast<std::size_t>(rr)] = level + 2;
                        next_rows.push_back(rr);
                    }
                }
            }
        }
        frontier_rows = std::move(next_rows);
        level += 2;
    }
}

}  // namespace

ParityCheckMatrix peg_generate(int n_cols, int n_rows, const DegreeDistribution& dist,
                               std::uint64_t seed) {
    if (n_rows <= 0 || n_rows >= n_cols)
        throw std::invalid_argument("peg_generate: need 0 < n_rows < n_cols");
    if (dist.max_degree() > n_rows)
        throw std::invalid_argument("peg_generate: max degree exceeds row count");

    // Expand counts into a degree per column; the seed decides which column
    // gets which degree, the construction afterwards is deterministic.
    std::vector<int> counts = dist.realize_counts(n_cols);
    std::vector<int> degree_of_col;
    degree_of_col.reserve(static_cast<std::size_t>(n_cols));
    int slot = 0;
    for (const auto& [deg, frac] : dist.fractions()) {
        (void)frac;
        for (int i = 0; i < counts[static_cast<std::size_t>(slot)]; ++i) degree_of_col.push_back(deg);
        ++slot;
    }
    Prng rng(seed);
    rng.shuffle(degree_of_col);

    std::vector<int> order(static_cast<std::size_t>(n_cols));
    for (int i = 0; i < n_cols; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return degree_of_col[static_cast<std::size_t>(a)] < degree_of_col[static_cast<std::size_t>(b)];
    });

    std::vector<std::vector<int>> col_rows(static_cast<std::size_t>(n_cols));
    std::vector<std::vector<int>> row_cols(static_cast<std::size_t>(n_rows));
    std::vector<int> row_deg(static_cast<std::size_t>(n_rows), 0);
    std::vector<int> depth(static_cast<std::size_t>(n_rows));
    std::vector<int> col_seen(static_cast<std::size_t>(n_cols), 0);
    std::vector<std::uint8_t> adjacent(static_cast<std::size_t>(n_rows), 0);
    int stamp = 0;

    for (int c : order) {
        const int deg = degree_of_col[static_cast<std::size_t>(c)];
        std::fill(adjacent.begin(), adjacent.end(), 0);
        for (int t = 0; t < deg; ++t) {
            int best = -1;
            long best_key = -1;
            if (t == 0) {
                std::fill(depth.begin(), depth.end(), -1);
            } else {
                row_distances(c, col_rows, row_cols, depth, col_seen, ++stamp);
            }
            // Farthest row wins (unreached counts as infinitely far); ties by
            // lowest current degree, then lowest index.
            for (int r = 0; r < n_rows; ++r) {
                if (adjacent[static_cast<std::size_t>(r)]) continue;
                long dist_key =
                    depth[static_cast<std::size_t>(r)] < 0
                        ? std::numeric_limits<int>::max()
                        : static_cast<long>(depth[static_cast<std::size_t>(r)]);
                long key = dist_key * static_cast<long>(n_rows + 1) * (n_cols + 1) -
                           static_cast<long>(row_deg[static_cast<std::size_t>(r)]) * (n_cols + 1) -
                           r;
                if (key > best_key) {
                    best_key = key;
                    best = r;
                }
            }
            if (best < 0) throw std::invalid_argument("peg_generate: no placeable row");
            adjacent[static_cast<std::size_t>(best)] = 1;
            col_rows[static_cast<std::size_t>(c)].push_back(best);
            row_cols[static_cast<std::size_t>(best)].push_back(c);
            row_deg[static_cast<std::size_t>(best)]++;
        }
    }

    std::vector<std::vector<int>> rows(static_cast<std::size_t>(n_rows));
    for (int r = 0; r < n_rows; ++r) {
        rows[static_cast<std::size_t>(r)] = row_cols[static_cast<std::size_t>(r)];
        std::sort(rows[static_cast<std::size_t>(r)].begin(), rows[static_cast<std::size_t>(r)].end());
    }
    return ParityCheckMatrix(n_cols, std::move(rows));
}

namespace {

struct TokenReader {
    std::ifstream in;
    int line = 1;
    explicit TokenReader(const std::filesystem::path& path) : in(path) {
        if (!in) throw parse_error("cannot open " + path.string());
    }
    int next_int(const char* what) {
        // Skip whitespace, tracking line numbers for diagnostics.
        int ch;
        while ((ch = in.peek()) != EOF && (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n')) {
            if (ch == '\n') ++line;
            in.get();
        }
        long long v;
        if (!(in >> v)) throw parse_error(std::string("expected ") + what, line);
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
            throw parse_error(std::string(what) + " out of range", line);
        return static_cast<int>(v);
    }
};

}  // namespace

ParityCheckMatrix load_alist(const std::filesystem::path& path) {
    TokenReader rd(path);
    const int n_cols = rd.next_int("column count");
    const int n_rows = rd.next_int("row count");
    if (n_cols <= 0 || n_rows <= 0) throw parse_error("non-positive matrix dimensions", rd.line);
    const int max_col_deg = rd.next_int("max column degree");
    const int max_row_deg = rd.next_int("max row degree");

    std::vector<int> col_deg(static_cast<std::size_t>(n_cols));
    for (auto& d : col_deg) {
        d = rd.next_int("column degree");
        if (d < 0 || d > max_col_deg) throw parse_error("column degree out of range", rd.line);
    }
    std::vector<int> row_deg(static_cast<std::size_t>(n_rows));
    for (auto& d : row_deg) {
        d = rd.next_int("row degree");
        if (d < 0 || d > max_row_deg) throw parse_error("row degree out of range", rd.line);
    }

    // Column lists are authoritative; the row lists are cross-checked below.
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(n_rows));
    for (int c = 0; c < n_cols; ++c) {
        for (int k = 0; k < max_col_deg; ++k) {
            int idx = rd.next_int("row index");
            if (k < col_deg[static_cast<std::size_t>(c)]) {
                if (idx < 1 || idx > n_rows) throw parse_error("row index out of range", rd.line);
                rows[static_cast<std::size_t>(idx - 1)].push_back(c);
            } else if (idx != 0) {
                throw parse_error("expected zero padding", rd.line);
            }
        }
    }
    for (int r = 0; r < n_rows; ++r) {
        std::vector<int> listed;
        for (int k = 0; k < max_row_deg; ++k) {
            int idx = rd.next_int("column index");
            if (k < row_deg[static_cast<std::size_t>(r)]) {
                if (idx < 1 || idx > n_cols) throw parse_error("column index out of range", rd.line);
                listed.push_back(idx - 1);
            } else if (idx != 0) {
                throw parse_error("expected zero padding", rd.line);
            }
        }
        std::sort(listed.begin(), listed.end());
        std::vector<int> derived = rows[static_cast<std::size_t>(r)];
        std::sort(derived.begin(), derived.end());
        if (listed != derived)
            throw parse_error("row list disagrees with column lists at row " + std::to_string(r + 1),
                              rd.line);
    }

    try {
        return ParityCheckMatrix(n_cols, std::move(rows));
    } catch (const std::invalid_argument& e) {
        throw parse_error(std::string("invalid matrix: ") + e.what());
    }
}

void save_alist(const ParityCheckMatrix& H, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());

    const auto& cols = H.cols_adjacency();
    std::size_t max_col_deg = 0, max_row_deg = 0;
    for (const auto& c : cols) max_col_deg = std::max(max_col_deg, c.size());
    for (const auto& r : H.rows()) max_row_deg = std::max(max_row_deg, r.size());

    out << H.cols() << " " << H.checks() << "\n";
    out << max_col_deg << " " << max_row_deg << "\n";
    for (int c = 0; c < H.cols(); ++c)
        out << cols[static_cast<std::size_t>(c)].size() << (c + 1 < H.cols() ? " " : "\n");
    for (int r = 0; r < H.checks(); ++r)
        out << H.row(r).size() << (r + 1 < H.checks() ? " " : "\n");
    for (const auto& c : cols) {
        for (std::size_t k = 0; k < max_col_deg; ++k)
            out << (k < c.size() ? c[k] + 1 : 0) << (k + 1 < max_col_deg ? " " : "");
        out << "\n";
    }
    for (const auto& r : H.rows()) {
        for (std::size_t k = 0; k < max_row_deg; ++k)
            out << (k < r.size() ? r[k] + 1 : 0) << (k + 1 < max_row_deg ? " " : "");
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

const std::vector<Rational>& CodePool::standard_rates() {
    static const std::vector<Rational> rates = [] {
        std::vector<Rational> r;
        for (int k = 18; k >= 10; --k) r.emplace_back(k, 20);
        return r;
    }();
    return rates;
}

CodePool::CodePool(int n_fr, std::map<Rational, ParityCheckMatrix> codes)
    : n_fr_(n_fr), codes_(std::move(codes)) {
    const auto& expected = standard_rates();
    if (codes_.size() != expected.size())
        throw std::invalid_argument("CodePool: expected exactly nine codes");
    for (const auto& rate : expected) {
        auto it = codes_.find(rate);
        if (it == codes_.end())
            throw std::invalid_argument("CodePool: missing rate " + rate.str());
        if (it->second.cols() != n_fr_)
            throw std::invalid_argument("CodePool: frame length mismatch at rate " + rate.str());
        if (it->second.rate() != rate)
            throw std::invalid_argument("CodePool: shape disagrees with rate " + rate.str());
    }
}

CodePool CodePool::generate(int n_fr, const std::map<Rational, DegreeDistribution>& dists,
                            std::uint64_t seed) {
    if (n_fr <= 0 || n_fr % 20 != 0)
        throw std::invalid_argument("CodePool: frame length must be a positive multiple of 20");
    std::map<Rational, ParityCheckMatrix> codes;
    int index = 0;
    for (const auto& rate : standard_rates()) {
        auto it = dists.find(rate);
        if (it == dists.end())
            throw std::invalid_argument("CodePool: no degree distribution for rate " + rate.str());
        const int n_rows = n_fr - static_cast<int>(rate.num * (n_fr / rate.den));
        codes.emplace(rate, peg_generate(n_fr, n_rows, it->second, derive_seed(seed, index)));
        ++index;
    }
    return CodePool(n_fr, std::move(codes));
}

namespace {

std::string rate_file_name(const Rational& rate) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "r%.2f.alist", rate.value());
    return buf;
}

}  // namespace

CodePool CodePool::load_directory(const std::filesystem::path& dir) {
    std::map<Rational, ParityCheckMatrix> codes;
    int n_fr = -1;
    for (const auto& rate : standard_rates()) {
        auto H = load_alist(dir / rate_file_name(rate));
        if (n_fr < 0) n_fr = H.cols();
        codes.emplace(rate, std::move(H));
    }
    return CodePool(n_fr, std::move(codes));
}

void CodePool::save_directory(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [rate, H] : codes_) save_alist(H, dir / rate_file_name(rate));
}

const ParityCheckMatrix& CodePool::at(Rational rate) const {
    auto it = codes_.find(rate);
    if (it == codes_.end()) throw std::invalid_argument("CodePool: unknown rate " + rate.str());
    return it->second;
}

std::vector<Rational> CodePool::rates() const {
    std::vector<Rational> out;
    for (auto it = codes_.rbegin(); it != codes_.rend(); ++it) out.push_back(it->first);
    return out;
}

std::map<Rational, DegreeDistribution> default_degree_distributions() {
    // Mild irregularity; the degree-2 share stays below the check count at
    // every rate so the degree-2 subgraph cannot dominate.
    std::map<Rational, DegreeDistribution> out;
    const DegreeDistribution high({{2, 0.08}, {3, 0.72}, {6, 0.20}});   // R = 0.85, 0.90
    const DegreeDistribution mid({{2, 0.15}, {3, 0.65}, {7, 0.20}});    // R = 0.70 .. 0.80
    const DegreeDistribution low({{2, 0.25}, {3, 0.50}, {8, 0.25}});    // R = 0.50 .. 0.65
    for (const auto& rate : CodePool::standard_rates()) {
        if (rate >= Rational(17, 20))
            out.emplace(rate, high);
        else if (rate >= Rational(14, 20))
            out.emplace(rate, mid);
        else
            out.emplace(rate, low);
    }
    return out;
}

std::map<Rational, DegreeDistribution> load_degree_distributions(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad JSON in ") + path.string() + ": " + e.what());
    }
    std::map<Rational, DegreeDistribution> out;
    for (const auto& [rate_key, entry] : doc.items()) {
        double rv = std::stod(rate_key);
        Rational rate(static_cast<std::int64_t>(std::llround(rv * 20)), 20);
        std::map<int, double> fractions;
        for (const auto& [deg_key, frac] : entry.items())
            fractions[std::stoi(deg_key)] = frac.get<double>();
        out.emplace(rate, DegreeDistribution(std::move(fractions)));
    }
    return out;
}

}  // namespace recon
