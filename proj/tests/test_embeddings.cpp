#include "seqtag/embeddings.hpp"

#include "seqtag/model.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

using namespace seqtag;

namespace {

struct CharSetup {
    CharEmbeddingTable table;
    CharCnn cnn;
};

CharSetup small_setup(Rng& rng, int d_chr = 4, int d_ce = 3, int k = 3, int n_chars = 9) {
    CharSetup s;
    s.table.M = scaled_uniform_matrix(d_chr, n_chars, rng);
    s.cnn.window = k;
    s.cnn.W = scaled_uniform_matrix(d_ce, static_cast<std::size_t>(d_chr) * k, rng);
    s.cnn.b = rng.uniform_vec(d_ce, -0.1, 0.1);
    return s;
}

// independent enumeration: materialize every padded window, take per-unit max
Vector naive_char_embed(const CharCnn& cnn, const CharEmbeddingTable& table,
                        const std::vector<int>& ids) {
    const int side = (cnn.window - 1) / 2;
    const int d = table.dim();
    std::vector<int> padded;
    for (int i = 0; i < side; ++i) padded.push_back(Vocabulary::kPadLeft);
    padded.insert(padded.end(), ids.begin(), ids.end());
    for (int i = 0; i < side; ++i) padded.push_back(Vocabulary::kPadRight);

    Vector best(cnn.W.rows(), -std::numeric_limits<double>::infinity());
    for (std::size_t w = 0; w + cnn.window <= padded.size(); ++w) {
        for (std::size_t j = 0; j < cnn.W.rows(); ++j) {
            double score = cnn.b[j];
            for (int p = 0; p < cnn.window; ++p)
                for (int r = 0; r < d; ++r)
                    score += cnn.W(j, static_cast<std::size_t>(p) * d + r) * table.M(r, padded[w + p]);
            best[j] = std::max(best[j], score);
        }
    }
    return best;
}

} // namespace

TEST_CASE("lookup_word returns the exact column") {
    Rng rng(1);
    WordEmbeddingTable t;
    t.M = random_matrix(5, 7, -1.0, 1.0, rng);
    const Vector rare = lookup_word(t, Vocabulary::kRare);
    for (std::size_t r = 0; r < 5; ++r) CHECK(rare[r] == t.M(r, 0));
    CHECK_THROWS_AS(lookup_word(t, 7), std::out_of_range);
    CHECK_THROWS_AS(lookup_word(t, -1), std::out_of_range);
}

TEST_CASE("lookup_word equals the one-hot matvec") {
    Rng rng(2);
    WordEmbeddingTable t;
    t.M = random_matrix(6, 9, -2.0, 2.0, rng);
    for (int id = 0; id < 9; ++id) {
        Vector onehot(9, 0.0);
        onehot[id] = 1.0;
        const Vector via_matvec = matvec(t.M, onehot);
        const Vector direct = lookup_word(t, id);
        for (std::size_t r = 0; r < 6; ++r) CHECK(direct[r] == via_matvec[r]);
    }
}

TEST_CASE("default dimensions match the standard configuration") {
    const ModelDims defaults{};
    CHECK(defaults.d_we == 50);
    CHECK(defaults.d_chr == 100);
    CHECK(defaults.d_ce == 25);
    CHECK(defaults.char_window == 3);
    CHECK(regime_input_dim(FeatureRegime::WE_CE, defaults.d_we, defaults.d_ce) == 75);
    CHECK(regime_input_dim(FeatureRegime::CE, defaults.d_we, defaults.d_ce) == 25);
    CHECK(regime_input_dim(FeatureRegime::WE, defaults.d_we, defaults.d_ce) == 50);
}

TEST_CASE("char_embed single-character word has exactly one window") {
    Rng rng(3);
    const CharSetup s = small_setup(rng);
    const std::vector<int> ids = {5};
    auto [y, trace] = char_embed(s.cnn, s.table, ids);

    // pad, c, pad concatenation fed through the filter, no max competition
    Vector q;
    for (int id : {Vocabulary::kPadLeft, 5, Vocabulary::kPadRight})
        for (int r = 0; r < s.table.dim(); ++r) q.push_back(s.table.M(r, id));
    const Vector want = vadd(matvec(s.cnn.W, q), s.cnn.b);
    for (std::size_t j = 0; j < y.size(); ++j) CHECK(y[j] == doctest::Approx(want[j]));
    for (int a : trace.argmax) CHECK(a == 0);
}

TEST_CASE("char_embed output length follows the filter rows") {
    Rng rng(4);
    CharSetup s;
    s.table.M = scaled_uniform_matrix(100, 10, rng);
    s.cnn.window = 3;
    s.cnn.W = scaled_uniform_matrix(25, 300, rng);
    s.cnn.b = Vector(25, 0.0);
    auto [y, trace] = char_embed(s.cnn, s.table, {3, 4, 5});
    CHECK(y.size() == 25);
    CHECK(trace.argmax.size() == 25);
}

TEST_CASE("char_embed matches the window-enumeration oracle") {
    Rng rng(5);
    for (int it = 0; it < 50; ++it) {
        const CharSetup s = small_setup(rng);
        std::vector<int> ids;
        const std::size_t len = 1 + rng.next_index(6);
        for (std::size_t i = 0; i < len; ++i) ids.push_back(static_cast<int>(rng.next_index(9)));
        auto [y, trace] = char_embed(s.cnn, s.table, ids);
        const Vector want = naive_char_embed(s.cnn, s.table, ids);
        for (std::size_t j = 0; j < y.size(); ++j) CHECK(y[j] == doctest::Approx(want[j]));
    }
    CHECK_THROWS_AS(char_embed(small_setup(rng).cnn, small_setup(rng).table, {}),
                    std::invalid_argument);
}

TEST_CASE("char_embed output dominates every window score") {
    Rng rng(6);
    const CharSetup s = small_setup(rng);
    const std::vector<int> ids = {3, 7, 4, 8};
    auto [y, trace] = char_embed(s.cnn, s.table, ids);
    const int side = (s.cnn.window - 1) / 2;
    std::vector<int> padded;
    for (int i = 0; i < side; ++i) padded.push_back(Vocabulary::kPadLeft);
    padded.insert(padded.end(), ids.begin(), ids.end());
    for (int i = 0; i < side; ++i) padded.push_back(Vocabulary::kPadRight);
    for (std::size_t w = 0; w + s.cnn.window <= padded.size(); ++w) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            double score = s.cnn.b[j];
            for (int p = 0; p < s.cnn.window; ++p)
                for (int r = 0; r < s.table.dim(); ++r)
                    score += s.cnn.W(j, static_cast<std::size_t>(p) * s.table.dim() + r) *
                             s.table.M(r, padded[w + p]);
            CHECK(y[j] >= score - 1e-12);
        }
    }
}

TEST_CASE("char_embed is invariant to swapping equal pad vectors") {
    Rng rng(7);
    CharSetup s = small_setup(rng);
    const Vector pad = rng.uniform_vec(s.table.dim(), -0.3, 0.3);
    s.table.M.set_col(Vocabulary::kPadLeft, pad);
    s.table.M.set_col(Vocabulary::kPadRight, pad);
    const std::vector<int> ids = {4, 6, 3};
    auto [y1, t1] = char_embed(s.cnn, s.table, ids);

    CharSetup swapped = s;
    swapped.table.M.set_col(Vocabulary::kPadLeft, s.table.M.col(Vocabulary::kPadRight));
    swapped.table.M.set_col(Vocabulary::kPadRight, s.table.M.col(Vocabulary::kPadLeft));
    auto [y2, t2] = char_embed(swapped.cnn, swapped.table, ids);
    for (std::size_t j = 0; j < y1.size(); ++j) CHECK(y1[j] == y2[j]);
}

TEST_CASE("pooling ties route to the lowest window index") {
    Rng rng(99);
    CharSetup s = small_setup(rng);
    // identical columns make every window identical, so every unit ties
    const Vector col = rng.uniform_vec(s.table.dim(), -0.5, 0.5);
    for (std::size_t c = 0; c < s.table.M.cols(); ++c) s.table.M.set_col(c, col);
    auto [y, trace] = char_embed(s.cnn, s.table, {3, 4, 5, 6});
    for (int a : trace.argmax) CHECK(a == 0);
    CHECK(trace.min_margin == 0.0);
}

TEST_CASE("backprop_char_embed zero gradient gives zero everywhere") {
    Rng rng(8);
    const CharSetup s = small_setup(rng);
    auto [y, trace] = char_embed(s.cnn, s.table, {2, 5});
    const CharCnnGrads g = backprop_char_embed(s.cnn, s.table, trace, Vector(y.size(), 0.0));
    for (std::size_t i = 0; i < g.dW.size(); ++i) CHECK(g.dW.data()[i] == 0.0);
    for (double v : g.db) CHECK(v == 0.0);
    CHECK(g.dchar_cols.empty());
}

TEST_CASE("single-window word backprop equals dense linear backprop") {
    Rng rng(9);
    const CharSetup s = small_setup(rng);
    const std::vector<int> ids = {6};
    auto [y, trace] = char_embed(s.cnn, s.table, ids);
    const Vector u = rng.uniform_vec(y.size(), -1.0, 1.0);
    const CharCnnGrads g = backprop_char_embed(s.cnn, s.table, trace, u);

    // dense layer: y = W q + b with q the single window
    Vector q;
    for (int id : {Vocabulary::kPadLeft, 6, Vocabulary::kPadRight})
        for (int r = 0; r < s.table.dim(); ++r) q.push_back(s.table.M(r, id));
    for (std::size_t j = 0; j < u.size(); ++j) {
        CHECK(g.db[j] == doctest::Approx(u[j]));
        for (std::size_t c = 0; c < q.size(); ++c)
            CHECK(g.dW(j, c) == doctest::Approx(u[j] * q[c]));
    }
    const Vector dq_center = g.dchar_cols.at(6);
    Vector want_center(s.table.dim(), 0.0);
    for (std::size_t j = 0; j < u.size(); ++j)
        for (int r = 0; r < s.table.dim(); ++r)
            want_center[r] += u[j] * s.cnn.W(j, static_cast<std::size_t>(s.table.dim()) + r);
    for (int r = 0; r < s.table.dim(); ++r)
        CHECK(dq_center[r] == doctest::Approx(want_center[r]));
}

TEST_CASE("backprop_char_embed matches central finite differences") {
    Rng rng(10);
    CharSetup s = small_setup(rng);
    const std::vector<int> ids = {4, 7, 3, 8, 5};
    auto [y0, trace] = char_embed(s.cnn, s.table, ids);
    REQUIRE(trace.min_margin > 1e-4); // non-degenerate point
    const Vector u = rng.uniform_vec(y0.size(), -1.0, 1.0);
    const CharCnnGrads g = backprop_char_embed(s.cnn, s.table, trace, u);

    const double h = 1e-5;
    auto f = [&]() {
        auto [y, t] = char_embed(s.cnn, s.table, ids);
        return dot(u, y);
    };
    auto check = [&](double analytic, double* slot) {
        const double saved = *slot;
        *slot = saved + h;
        const double fp = f();
        *slot = saved - h;
        const double fm = f();
        *slot = saved;
        const double numeric = (fp - fm) / (2 * h);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
        CHECK(std::abs(analytic - numeric) / denom < 1e-4);
    };

    for (std::size_t i = 0; i < s.cnn.W.size(); ++i) check(g.dW.data()[i], s.cnn.W.data() + i);
    for (std::size_t j = 0; j < s.cnn.b.size(); ++j) check(g.db[j], s.cnn.b.data() + j);
    for (int id = 0; id < static_cast<int>(s.table.M.cols()); ++id) {
        const auto it = g.dchar_cols.find(id);
        for (int r = 0; r < s.table.dim(); ++r) {
            const double analytic = it == g.dchar_cols.end() ? 0.0 : it->second[r];
            check(analytic, &s.table.M(static_cast<std::size_t>(r), static_cast<std::size_t>(id)));
        }
    }
}

TEST_CASE("backprop with a mismatched trace is a hard error") {
    Rng rng(11);
    const CharSetup s = small_setup(rng);
    CharCnnTrace stale;
    stale.argmax = {0};
    CHECK_THROWS_AS(backprop_char_embed(s.cnn, s.table, stale, Vector(3, 0.0)),
                    std::runtime_error);
}

TEST_CASE("token_features regimes") {
    const Vector w = {1, 2, 3};
    const Vector y = {4, 5};
    CHECK(token_features(FeatureRegime::WE, &w, nullptr) == w);
    CHECK(token_features(FeatureRegime::CE, nullptr, &y) == y);
    const Vector both = token_features(FeatureRegime::WE_CE, &w, &y);
    CHECK(both == Vector{1, 2, 3, 4, 5});
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(both[i] == w[i]);
    CHECK_THROWS_AS(token_features(FeatureRegime::WE_CE, &w, nullptr), std::invalid_argument);
    CHECK_THROWS_AS(token_features(FeatureRegime::WE, nullptr, &y), std::invalid_argument);
}

TEST_CASE("load_pretrained covers vocab words and falls back to the rare vector") {
    Vocabulary vocab;
    vocab.add("alpha");
    vocab.add("beta");
    vocab.add("gamma");

    const std::string path = "vectors_test.tmp";
    {
        std::ofstream out(path);
        out << "4 3\n";
        out << "alpha 1 2 3\n";
        out << "beta 4 5 6\n";
        out << "<RARE> 9 9 9\n";
        out << "unrelated 7 7 7\n";
    }
    Rng rng(13);
    const WordEmbeddingTable t = load_pretrained(path, vocab, 3, rng);
    CHECK(t.M.col(vocab.lookup("alpha")) == Vector{1, 2, 3});
    CHECK(t.M.col(vocab.lookup("beta")) == Vector{4, 5, 6});
    // gamma missing from the file: gets the rare vector; so do the specials
    CHECK(t.M.col(vocab.lookup("gamma")) == Vector{9, 9, 9});
    CHECK(t.M.col(Vocabulary::kRare) == Vector{9, 9, 9});

    Rng rng2(13);
    CHECK_THROWS_AS(load_pretrained(path, vocab, 5, rng2), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("the rare-word token string is configurable") {
    Vocabulary vocab;
    vocab.add("alpha");
    vocab.add("beta");
    const std::string path = "vectors_rare.tmp";
    {
        std::ofstream out(path);
        out << "alpha 1 2\n";
        out << "UNK 5 5\n";
    }
    Rng rng(31);
    PretrainedOptions opts;
    opts.rare_token = "UNK";
    const WordEmbeddingTable t = load_pretrained(path, vocab, 2, rng, opts);
    CHECK(t.M.col(vocab.lookup("beta")) == Vector{5, 5});
    std::remove(path.c_str());
}

TEST_CASE("load_pretrained without a rare vector falls back to small random") {
    Vocabulary vocab;
    vocab.add("alpha");
    const std::string path = "vectors_test2.tmp";
    {
        std::ofstream out(path);
        out << "alpha 1 1\n"; // no header line, no rare token
    }
    Rng rng(17);
    const WordEmbeddingTable t = load_pretrained(path, vocab, 2, rng);
    CHECK(t.M.col(vocab.lookup("alpha")) == Vector{1, 1});
    for (double v : t.M.col(Vocabulary::kRare)) CHECK(std::abs(v) <= 0.01);
    std::remove(path.c_str());
}

TEST_CASE("load_pretrained reports the offending line") {
    Vocabulary vocab;
    vocab.add("alpha");
    const std::string path = "vectors_test3.tmp";
    {
        std::ofstream out(path);
        out << "alpha 1 2\n";
        out << "beta 1\n";
    }
    Rng rng(19);
    CHECK_THROWS_WITH_AS(load_pretrained(path, vocab, 2, rng), doctest::Contains("line 2"),
                         std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("word vectors save then load reproduces the table bit-exactly") {
    Rng rng(23);
    Vocabulary vocab;
    vocab.add("one");
    vocab.add("two");
    vocab.add("three");
    WordEmbeddingTable t;
    t.M = random_matrix(4, vocab.size(), -1.0, 1.0, rng);

    const std::string path = "vectors_roundtrip.tmp";
    save_word_vectors(path, vocab, t);
    Rng rng2(29);
    const WordEmbeddingTable back = load_pretrained(path, vocab, 4, rng2);
    CHECK(back.M == t.M);
    std::remove(path.c_str());
}
