#include "seqtag/crf.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace seqtag;

TEST_CASE("sentence_score single token uses the start row") {
    Rng rng(1);
    const auto em = oracle::random_emissions(rng, 1, 3);
    const Matrix trans = oracle::random_transitions(rng, 3);
    for (int t = 0; t < 3; ++t)
        CHECK(sentence_score(em, {t}, trans) == doctest::Approx(trans(3, t) + em[0][t]));
}

TEST_CASE("sentence_score with zero transitions sums emissions") {
    Rng rng(2);
    const auto em = oracle::random_emissions(rng, 4, 3);
    const Matrix trans = make_transitions(3);
    const std::vector<int> tags = {2, 0, 1, 2};
    double want = 0.0;
    for (std::size_t i = 0; i < tags.size(); ++i) want += em[i][tags[i]];
    CHECK(sentence_score(em, tags, trans) == doctest::Approx(want));
}

TEST_CASE("sentence_score matches an independent loop oracle") {
    Rng rng(3);
    for (int it = 0; it < 100; ++it) {
        const std::size_t T = 2 + rng.next_index(3);
        const std::size_t n = 1 + rng.next_index(5);
        const auto em = oracle::random_emissions(rng, n, T);
        const Matrix trans = oracle::random_transitions(rng, T);
        std::vector<int> tags(n);
        for (auto& t : tags) t = static_cast<int>(rng.next_index(T));
        CHECK(sentence_score(em, tags, trans) ==
              doctest::Approx(oracle::seq_score(em, tags, trans)).epsilon(1e-12));
    }
    const auto em = oracle::random_emissions(rng, 2, 3);
    const Matrix trans = oracle::random_transitions(rng, 3);
    CHECK_THROWS_AS(sentence_score(em, {0}, trans), std::invalid_argument);
    CHECK_THROWS_AS(sentence_score(em, {0, 5}, trans), std::invalid_argument);
}

TEST_CASE("log_partition base case and uniform lattice") {
    Rng rng(4);
    const auto em1 = oracle::random_emissions(rng, 1, 4);
    const Matrix trans1 = oracle::random_transitions(rng, 4);
    Vector first(4);
    for (int j = 0; j < 4; ++j) first[j] = trans1(4, j) + em1[0][j];
    CHECK(log_partition(em1, trans1) == doctest::Approx(log_sum_exp(first)));

    const std::vector<Vector> zeros(4, Vector(3, 0.0));
    CHECK(log_partition(zeros, make_transitions(3)) == doctest::Approx(4.0 * std::log(3.0)));
}

TEST_CASE("log_partition matches exhaustive enumeration") {
    Rng rng(5);
    for (int it = 0; it < 100; ++it) {
        const std::size_t T = 2 + rng.next_index(3);
        const std::size_t n = 1 + rng.next_index(6);
        const auto em = oracle::random_emissions(rng, n, T);
        const Matrix trans = oracle::random_transitions(rng, T);
        CHECK(std::abs(log_partition(em, trans) - oracle::log_partition(em, trans)) < 1e-8);
    }
}

TEST_CASE("log_partition dominates every sequence score") {
    Rng rng(6);
    for (int it = 0; it < 120; ++it) {
        const std::size_t T = 2 + rng.next_index(3);
        const std::size_t n = 1 + rng.next_index(5);
        const auto em = oracle::random_emissions(rng, n, T);
        const Matrix trans = oracle::random_transitions(rng, T);
        const double logz = log_partition(em, trans);
        std::vector<int> tags(n);
        for (auto& t : tags) t = static_cast<int>(rng.next_index(T));
        CHECK(logz >= sentence_score(em, tags, trans));
    }
}

TEST_CASE("viterbi degenerate cases") {
    Rng rng(7);
    const auto em = oracle::random_emissions(rng, 5, 1);
    const Matrix trans = oracle::random_transitions(rng, 1);
    const DecodeResult one = viterbi(em, trans);
    CHECK(one.tags == std::vector<int>{0, 0, 0, 0, 0});

    const auto em3 = oracle::random_emissions(rng, 4, 3);
    const DecodeResult free_decode = viterbi(em3, make_transitions(3));
    for (std::size_t t = 0; t < 4; ++t) {
        int arg = 0;
        for (int j = 1; j < 3; ++j)
            if (em3[t][j] > em3[t][arg]) arg = j;
        CHECK(free_decode.tags[t] == arg);
    }
}

TEST_CASE("viterbi ties break toward the lower tag index") {
    // a fully uniform lattice ties everywhere
    const std::vector<Vector> zeros(4, Vector(3, 0.0));
    const DecodeResult r = viterbi(zeros, make_transitions(3));
    CHECK(r.tags == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("viterbi matches brute force and re-verifies its own score") {
    Rng rng(8);
    for (int it = 0; it < 100; ++it) {
        const std::size_t T = 2 + rng.next_index(3);
        const std::size_t n = 1 + rng.next_index(6);
        const auto em = oracle::random_emissions(rng, n, T);
        const Matrix trans = oracle::random_transitions(rng, T);
        const DecodeResult got = viterbi(em, trans);
        const oracle::Best want = oracle::best_sequence(em, trans);
        CHECK(std::abs(got.score - want.score) < 1e-10);
        CHECK(got.score == sentence_score(em, got.tags, trans)); // exact by construction
    }
}

TEST_CASE("marginals base case, symmetry and row sums") {
    Rng rng(9);
    const auto em = oracle::random_emissions(rng, 1, 3);
    const Matrix trans = oracle::random_transitions(rng, 3);
    const Matrix m1 = marginals(em, trans);
    Vector logits(3);
    for (int j = 0; j < 3; ++j) logits[j] = trans(3, j) + em[0][j];
    const double lse = log_sum_exp(logits);
    for (int j = 0; j < 3; ++j) CHECK(m1(0, j) == doctest::Approx(std::exp(logits[j] - lse)));

    const std::vector<Vector> zeros(4, Vector(3, 0.0));
    const Matrix mu = marginals(zeros, make_transitions(3));
    for (std::size_t t = 0; t < 4; ++t)
        for (int j = 0; j < 3; ++j) CHECK(mu(t, j) == doctest::Approx(1.0 / 3.0));

    for (int it = 0; it < 100; ++it) {
        const std::size_t T = 2 + rng.next_index(3);
        const std::size_t n = 1 + rng.next_index(5);
        const auto e = oracle::random_emissions(rng, n, T);
        const Matrix tr = oracle::random_transitions(rng, T);
        const Matrix m = marginals(e, tr);
        const Matrix want = oracle::enumeration_marginals(e, tr);
        for (std::size_t t = 0; t < n; ++t) {
            double row = 0.0;
            for (std::size_t j = 0; j < T; ++j) {
                CHECK(m(t, j) == doctest::Approx(want(t, j)).epsilon(1e-7));
                row += m(t, j);
            }
            CHECK(std::abs(row - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("nll degenerate single-tag case is exactly zero") {
    Rng rng(10);
    const auto em = oracle::random_emissions(rng, 5, 1);
    const Matrix trans = oracle::random_transitions(rng, 1);
    const CrfNll r = nll_and_gradients(em, {0, 0, 0, 0, 0}, trans);
    CHECK(r.loss == doctest::Approx(0.0));
    for (const auto& g : r.grad_emissions)
        for (double v : g) CHECK(std::abs(v) < 1e-12);
    for (std::size_t i = 0; i < r.grad_trans.size(); ++i)
        CHECK(std::abs(r.grad_trans.data()[i]) < 1e-12);
}

TEST_CASE("nll is nonnegative and emission gradients sum to zero per position") {
    Rng rng(11);
    for (int it = 0; it < 120; ++it) {
        const std::size_t T = 2 + rng.next_index(3);
        const std::size_t n = 1 + rng.next_index(6);
        const auto em = oracle::random_emissions(rng, n, T);
        const Matrix trans = oracle::random_transitions(rng, T);
        std::vector<int> gold(n);
        for (auto& t : gold) t = static_cast<int>(rng.next_index(T));
        const CrfNll r = nll_and_gradients(em, gold, trans);
        CHECK(r.loss >= -1e-12);
        for (std::size_t t = 0; t < n; ++t) {
            double s = 0.0;
            for (std::size_t j = 0; j < T; ++j) s += r.grad_emissions[t][j];
            CHECK(std::abs(s) < 1e-10);
        }
    }
}

TEST_CASE("nll gradients match central finite differences at 1e-6") {
    Rng rng(12);
    const std::size_t T = 3, n = 5;
    auto em = oracle::random_emissions(rng, n, T);
    Matrix trans = oracle::random_transitions(rng, T);
    std::vector<int> gold(n);
    for (auto& t : gold) t = static_cast<int>(rng.next_index(T));

    const CrfNll analytic = nll_and_gradients(em, gold, trans);
    const double h = 1e-5;
    auto loss = [&]() { return nll_and_gradients(em, gold, trans).loss; };
    auto fd = [&](double* slot) {
        const double saved = *slot;
        *slot = saved + h;
        const double lp = loss();
        *slot = saved - h;
        const double lm = loss();
        *slot = saved;
        return (lp - lm) / (2 * h);
    };
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < T; ++j) {
            const double numeric = fd(&em[t][j]);
            const double a = analytic.grad_emissions[t][j];
            CHECK(std::abs(a - numeric) <= 1e-6 * std::max({std::abs(a), std::abs(numeric), 1e-3}));
        }
    for (std::size_t i = 0; i < trans.size(); ++i) {
        const double numeric = fd(trans.data() + i);
        const double a = analytic.grad_trans.data()[i];
        CHECK(std::abs(a - numeric) <= 1e-6 * std::max({std::abs(a), std::abs(numeric), 1e-3}));
    }
}

TEST_CASE("adding a constant at one position shifts scores and preserves structure") {
    Rng rng(13);
    for (int it = 0; it < 100; ++it) {
        const std::size_t T = 2 + rng.next_index(3);
        const std::size_t n = 2 + rng.next_index(4);
        const auto em = oracle::random_emissions(rng, n, T);
        const Matrix trans = oracle::random_transitions(rng, T);
        const double c = rng.uniform(-4.0, 4.0);
        const std::size_t pos = rng.next_index(n);

        auto shifted = em;
        for (std::size_t j = 0; j < T; ++j) shifted[pos][j] += c;

        CHECK(std::abs(log_partition(shifted, trans) - (log_partition(em, trans) + c)) < 1e-9);

        std::vector<int> tags(n);
        for (auto& t : tags) t = static_cast<int>(rng.next_index(T));
        CHECK(std::abs(sentence_score(shifted, tags, trans) -
                       (sentence_score(em, tags, trans) + c)) < 1e-9);

        const DecodeResult v0 = viterbi(em, trans);
        const DecodeResult v1 = viterbi(shifted, trans);
        CHECK(v0.tags == v1.tags);
        CHECK(std::abs(v1.score - (v0.score + c)) < 1e-9);

        const Matrix m0 = marginals(em, trans);
        const Matrix m1 = marginals(shifted, trans);
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t j = 0; j < T; ++j) CHECK(std::abs(m0(t, j) - m1(t, j)) < 1e-9);
    }
}

TEST_CASE("log_partition equals the gold score only when one sequence has all the mass") {
    // a lattice so peaked that the argmax holds probability ~1
    const std::size_t T = 2;
    std::vector<Vector> em(3, Vector(T, 0.0));
    for (auto& e : em) e[0] = 200.0;
    const Matrix trans = make_transitions(T);
    const double logz = log_partition(em, trans);
    const double gold = sentence_score(em, {0, 0, 0}, trans);
    CHECK(logz == doctest::Approx(gold).epsilon(1e-12));
    const double other = sentence_score(em, {1, 0, 0}, trans);
    CHECK(logz > other);
}
