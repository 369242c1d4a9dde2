#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "recon/ldpc.hpp"

using namespace recon;

namespace {

// Dense GF(2) matrix-vector oracle, independent of the sparse row-set path.
Bits dense_syndrome(const Bits& key, const ParityCheckMatrix& H) {
    std::vector<std::vector<int>> dense(static_cast<std::size_t>(H.checks()),
                                        std::vector<int>(static_cast<std::size_t>(H.cols()), 0));
    for (int j = 0; j < H.checks(); ++j)
        for (int c : H.row(j)) dense[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] = 1;
    Bits out(static_cast<std::size_t>(H.checks()), 0);
    for (int j = 0; j < H.checks(); ++j) {
        int sum = 0;
        for (int c = 0; c < H.cols(); ++c)
            sum += dense[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] *
                   key[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(sum % 2);
    }
    return out;
}

// Number of column pairs sharing at least two rows (each such pair is a
// length-4 cycle in the Tanner graph).
int four_cycle_count(const ParityCheckMatrix& H) {
    int cycles = 0;
    const auto& cols = H.cols_adjacency();
    for (int a = 0; a < H.cols(); ++a)
        for (int b = a + 1; b < H.cols(); ++b) {
            int shared = 0;
            for (int r : cols[static_cast<std::size_t>(a)])
                for (int s : cols[static_cast<std::size_t>(b)])
                    if (r == s) ++shared;
            if (shared >= 2) ++cycles;
        }
    return cycles;
}

ParityCheckMatrix small_matrix() {
    // 6 columns, 3 rows, rate 1/2.
    return ParityCheckMatrix(6, {{0, 1, 2}, {2, 3, 4}, {0, 4, 5}});
}

}  // namespace

TEST_CASE("binary_entropy endpoints and formula") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.02) == doctest::Approx(0.14144054254182067).epsilon(1e-9));
    CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("parity check matrix validation") {
    CHECK_THROWS_AS(ParityCheckMatrix(6, {{0, 1}, {}, {2, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(ParityCheckMatrix(6, {{0, 1, 1}, {2, 3, 4}, {0, 4, 5}}), std::invalid_argument);
    CHECK_THROWS_AS(ParityCheckMatrix(6, {{0, 6}, {1, 2}, {3, 4}}), std::invalid_argument);
    // column 5 never used
    CHECK_THROWS_AS(ParityCheckMatrix(6, {{0, 1, 2}, {2, 3, 4}, {0, 1, 4}}), std::invalid_argument);
    // 4 rows over 6 columns: rate 1/3 is not a multiple of 1/20
    CHECK_THROWS_AS(ParityCheckMatrix(6, {{0, 1}, {2, 3}, {4, 5}, {0, 5}}), std::invalid_argument);
    CHECK(small_matrix().rate() == Rational(1, 2));
}

TEST_CASE("compute_syndrome basics") {
    ParityCheckMatrix H = small_matrix();
    CHECK(compute_syndrome(Bits(6, 0), H) == Bits{0, 0, 0});

    // Unit vector picks out the rows containing that column.
    for (int c = 0; c < 6; ++c) {
        Bits unit(6, 0);
        unit[static_cast<std::size_t>(c)] = 1;
        Bits s = compute_syndrome(unit, H);
        for (int j = 0; j < 3; ++j) {
            bool contains = false;
            for (int cc : H.row(j)) contains |= (cc == c);
            CHECK(s[static_cast<std::size_t>(j)] == (contains ? 1 : 0));
        }
    }
    CHECK_THROWS_AS(compute_syndrome(Bits(5, 0), H), std::invalid_argument);
}

TEST_CASE("compute_syndrome agrees with the dense oracle and is linear") {
    Prng rng(123);
    DegreeDistribution dist({{2, 0.5}, {3, 0.5}});
    ParityCheckMatrix H = peg_generate(20, 10, dist, 9);
    for (int trial = 0; trial < 25; ++trial) {
        Bits a = rng.random_bits(20);
        Bits b = rng.random_bits(20);
        CHECK(compute_syndrome(a, H) == dense_syndrome(a, H));
        CHECK(compute_syndrome(xor_bits(a, b), H) ==
              xor_bits(compute_syndrome(a, H), compute_syndrome(b, H)));
    }
}

TEST_CASE("degree distribution validation and rounding") {
    CHECK_THROWS_AS(DegreeDistribution({{1, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution({{2, 0.7}, {3, 0.2}}), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution({{2, 1.2}, {3, -0.2}}), std::invalid_argument);

    DegreeDistribution d({{2, 0.3}, {3, 0.45}, {7, 0.25}});
    auto counts = d.realize_counts(10);
    // largest remainder: exact targets 3.0, 4.5, 2.5 -> 3, 5, 2 (tie to degree 3)
    CHECK(counts == std::vector<int>{3, 5, 2});
    int total = 0;
    for (int c : counts) total += c;
    CHECK(total == 10);
}

TEST_CASE("peg_generate determinism and degree realization") {
    DegreeDistribution dist({{2, 1.0}});
    ParityCheckMatrix a = peg_generate(8, 4, dist, 7);
    ParityCheckMatrix b = peg_generate(8, 4, dist, 7);
    CHECK(a == b);
    for (int c = 0; c < 8; ++c) CHECK(a.cols_adjacency()[static_cast<std::size_t>(c)].size() == 2);

    // 8 degree-2 columns over C(4,2)=6 distinct row pairs force at least two
    // duplicate pairs; PEG should not do worse than that floor.
    CHECK(four_cycle_count(a) <= 2);
}

TEST_CASE("peg avoids 4-cycles when the geometry allows it") {
    DegreeDistribution dist({{2, 1.0}});
    // 20 degree-2 columns over C(8,2)=28 available row pairs: all distinct.
    ParityCheckMatrix H = peg_generate(20, 8, dist, 3);
    CHECK(four_cycle_count(H) == 0);
}

TEST_CASE("peg_generate histogram at frame size") {
    DegreeDistribution dist({{2, 0.08}, {3, 0.72}, {6, 0.20}});
    ParityCheckMatrix H = peg_generate(4000, 400, dist, 42);
    std::map<std::size_t, int> hist;
    for (const auto& rows : H.cols_adjacency()) hist[rows.size()]++;
    auto expected = dist.realize_counts(4000);
    CHECK(hist[2] == expected[0]);
    CHECK(hist[3] == expected[1]);
    CHECK(hist[6] == expected[2]);
    CHECK(H.rate() == Rational(9, 10));
}

TEST_CASE("peg_generate validates inputs") {
    CHECK_THROWS_AS(peg_generate(8, 9, DegreeDistribution({{2, 1.0}}), 1), std::invalid_argument);
    // degree above the row count is unrealizable
    CHECK_THROWS_AS(peg_generate(8, 4, DegreeDistribution({{5, 1.0}}), 1), std::invalid_argument);
}

TEST_CASE("peg_generate satisfies matrix invariants over random shapes") {
    Prng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 20 * static_cast<int>(1 + rng.uniform_below(5));  // 20..100
        const int m = n / 2;
        const double f2 = 0.2 + 0.4 * rng.next_double();
        DegreeDistribution dist({{2, f2}, {3, 1.0 - f2}});
        ParityCheckMatrix H = peg_generate(n, m, dist, rng.next_u64());
        CHECK(H.cols() == n);
        CHECK(H.checks() == m);  // constructor revalidates everything else
    }
}

TEST_CASE("alist round trip") {
    DegreeDistribution dist({{2, 0.4}, {3, 0.6}});
    ParityCheckMatrix H = peg_generate(40, 20, dist, 5);
    auto path = std::filesystem::temp_directory_path() / "recon_test_roundtrip.alist";
    save_alist(H, path);
    ParityCheckMatrix loaded = load_alist(path);
    CHECK(loaded == H);
    std::filesystem::remove(path);
}

TEST_CASE("alist hand-written fixture") {
    // Same matrix as small_matrix(), written out by hand.
    auto path = std::filesystem::temp_directory_path() / "recon_test_fixture.alist";
    {
        std::ofstream out(path);
        out << "6 3\n2 3\n";
        out << "2 1 2 1 2 1\n";                   // column degrees
        out << "3 3 3\n";                          // row degrees
        out << "1 3\n1 0\n1 2\n2 0\n2 3\n3 0\n";  // per-column rows, 1-based
        out << "1 2 3\n3 4 5\n1 5 6\n";           // per-row columns, 1-based
    }
    ParityCheckMatrix H = load_alist(path);
    CHECK(H == small_matrix());
    std::filesystem::remove(path);
}

TEST_CASE("alist parse errors carry line information") {
    auto path = std::filesystem::temp_directory_path() / "recon_test_bad.alist";
    {
        std::ofstream out(path);
        out << "6 3\n2 3\n";
        out << "2 1 2 1 2 1\n3 3 3\n";
        out << "1 9\n1 0\n1 2\n2 0\n2 3\n3 0\n";  // row index 9 out of range
        out << "1 2 3\n3 4 5\n1 5 6\n";
    }
    CHECK_THROWS_AS(load_alist(path), parse_error);
    try {
        load_alist(path);
    } catch (const parse_error& e) {
        CHECK(e.line == 5);
    }
    std::filesystem::remove(path);

    CHECK_THROWS_AS(load_alist("/nonexistent/nowhere.alist"), parse_error);
}

TEST_CASE("code pool generation, lookup, and directory round trip") {
    const int n_fr = 200;
    CodePool pool = CodePool::generate(n_fr, default_degree_distributions(), 11);
    CHECK(pool.frame_length() == n_fr);
    auto rates = pool.rates();
    REQUIRE(rates.size() == 9);
    CHECK(rates.front() == Rational(9, 10));
    CHECK(rates.back() == Rational(1, 2));
    for (const auto& r : rates) {
        const ParityCheckMatrix& H = pool.at(r);
        CHECK(H.cols() == n_fr);
        CHECK(H.rate() == r);
    }
    CHECK_THROWS_AS(CodePool::generate(130, default_degree_distributions(), 1),
                    std::invalid_argument);

    auto dir = std::filesystem::temp_directory_path() / "recon_test_pool";
    pool.save_directory(dir);
    CodePool loaded = CodePool::load_directory(dir);
    for (const auto& r : rates) CHECK(loaded.at(r) == pool.at(r));
    std::filesystem::remove_all(dir);
}

TEST_CASE("shipped degree distribution file matches the built-in defaults") {
    auto path = std::filesystem::path(RECON_SOURCE_DIR) / "data" / "degree_distributions.json";
    auto from_file = load_degree_distributions(path);
    auto builtin = default_degree_distributions();
    REQUIRE(from_file.size() == builtin.size());
    for (const auto& [rate, dist] : builtin) {
        REQUIRE(from_file.count(rate) == 1);
        const auto& other = from_file.at(rate).fractions();
        REQUIRE(other.size() == dist.fractions().size());
        for (const auto& [deg, frac] : dist.fractions())
            CHECK(other.at(deg) == doctest::Approx(frac).epsilon(1e-12));
    }
}
