#include "seqtag/encoders.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace seqtag;

namespace {

std::vector<Vector> random_inputs(Rng& rng, std::size_t n, int dim, double range = 1.0) {
    std::vector<Vector> xs(n);
    for (auto& x : xs) x = rng.uniform_vec(static_cast<std::size_t>(dim), -range, range);
    return xs;
}

EncoderConfig make_config(Architecture arch, int n_in, int n_hidden, int n_out) {
    EncoderConfig cfg;
    cfg.arch = arch;
    cfg.n_in = n_in;
    cfg.n_hidden = n_hidden;
    cfg.n_out = n_out;
    return cfg;
}

// plain-loop helpers for the literal re-implementation below
Vector mv(const Matrix& m, const Vector& v) {
    Vector out(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[r] += m(r, c) * v[c];
    return out;
}
Vector sig(Vector v) {
    for (double& x : v) x = 1.0 / (1.0 + std::exp(-x));
    return v;
}
Vector th(Vector v) {
    for (double& x : v) x = std::tanh(x);
    return v;
}
Vector plus(Vector a, const Vector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
Vector times(Vector a, const Vector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    return a;
}

// z(t) = V (hl : hr) computed the straightforward way
std::vector<Vector> literal_output(const Matrix& V, const std::vector<Vector>& hl,
                                   const std::vector<Vector>& hr) {
    const std::size_t nh = hl[0].size();
    std::vector<Vector> zs(hl.size());
    for (std::size_t t = 0; t < hl.size(); ++t) {
        Vector cat = hl[t];
        cat.insert(cat.end(), hr[t].begin(), hr[t].end());
        zs[t] = mv(V, cat);
        (void)nh;
    }
    return zs;
}

// hidden-state recursions scripted one equation at a time
std::vector<Vector> literal_rnn_dir(const RnnDir& d, const std::vector<Vector>& xs, bool bias) {
    std::vector<Vector> hs;
    Vector h = d.h0;
    for (const auto& x : xs) {
        Vector a = plus(mv(d.U, x), mv(d.W, h));
        if (bias) a = plus(a, d.b);
        h = th(a);
        hs.push_back(h);
    }
    return hs;
}

std::vector<Vector> literal_lstm_dir(const LstmDir& d, const std::vector<Vector>& xs) {
    std::vector<Vector> hs;
    Vector h = d.h0, c = d.c0;
    for (const auto& x : xs) {
        const Vector i = sig(plus(plus(mv(d.Ui, x), mv(d.Wi, h)), d.bi));
        const Vector f = sig(plus(plus(mv(d.Uf, x), mv(d.Wf, h)), d.bf));
        const Vector o = sig(plus(plus(mv(d.Uo, x), mv(d.Wo, h)), d.bo));
        const Vector g = th(plus(plus(mv(d.Ug, x), mv(d.Wg, h)), d.bg));
        c = plus(times(c, f), times(g, i));
        h = times(th(c), o);
        hs.push_back(h);
    }
    return hs;
}

std::vector<Vector> literal_gru_dir(const GruDir& d, const std::vector<Vector>& xs) {
    std::vector<Vector> hs;
    Vector h = d.h0;
    for (const auto& x : xs) {
        const Vector z = sig(plus(plus(mv(d.Uz, x), mv(d.Wz, h)), d.bz));
        const Vector r = sig(plus(plus(mv(d.Ur, x), mv(d.Wr, h)), d.br));
        const Vector htil = th(plus(plus(mv(d.Uh, x), mv(d.Wh, times(r, h))), d.bh));
        Vector hn(h.size());
        for (std::size_t j = 0; j < h.size(); ++j)
            hn[j] = z[j] * htil[j] + (1.0 - z[j]) * h[j];
        h = hn;
        hs.push_back(h);
    }
    return hs;
}

std::vector<Vector> reversed(std::vector<Vector> v) {
    std::reverse(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("length-1 BiRNN matches the closed form") {
    Rng rng(1);
    const EncoderConfig cfg = make_config(Architecture::BiRNN, 3, 4, 2);
    const EncoderParams params = init_params(cfg, rng);
    const auto& p = std::get<BiRnnParams>(params);
    const std::vector<Vector> xs = random_inputs(rng, 1, 3);

    const EncoderForward fwd = forward(params, cfg, xs);
    const Vector hl = th(plus(plus(mv(p.left.U, xs[0]), mv(p.left.W, p.left.h0)), p.left.b));
    const Vector hr = th(plus(plus(mv(p.right.U, xs[0]), mv(p.right.W, p.right.h0)), p.right.b));
    const Vector z = literal_output(p.V, {hl}, {hr})[0];
    for (std::size_t j = 0; j < z.size(); ++j)
        CHECK(fwd.scores[0][j] == doctest::Approx(z[j]).epsilon(1e-12));
}

TEST_CASE("saturated LSTM gates keep the cell constant") {
    Rng rng(2);
    const EncoderConfig cfg = make_config(Architecture::BiLSTM, 2, 3, 2);
    EncoderParams params = init_params(cfg, rng);
    auto& p = std::get<LstmParams>(params);
    for (LstmDir* d : {&p.left, &p.right}) {
        d->bf.assign(d->bf.size(), 40.0);  // forget gate pinned to 1
        d->bi.assign(d->bi.size(), -40.0); // input gate pinned to 0
    }
    const std::vector<Vector> xs = random_inputs(rng, 5, 2);
    const EncoderForward fwd = forward(params, cfg, xs);
    const auto& tr = std::get<LstmTrace>(fwd.trace.detail);
    for (std::size_t t = 1; t <= 5; ++t)
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(tr.left.c[t][j] == doctest::Approx(p.left.c0[j]).epsilon(1e-9));
            CHECK(tr.right.c[t][j] == doctest::Approx(p.right.c0[j]).epsilon(1e-9));
        }
}

TEST_CASE("forward matches an equation-by-equation script on a 5-token sentence") {
    Rng rng(3);
    const std::size_t n = 5;
    for (const Architecture arch : {Architecture::BiRNN, Architecture::BiLSTM, Architecture::BiGRU}) {
        const EncoderConfig cfg = make_config(arch, 3, 4, 3);
        const EncoderParams params = init_params(cfg, rng);
        const std::vector<Vector> xs = random_inputs(rng, n, 3);
        const EncoderForward fwd = forward(params, cfg, xs);

        std::vector<Vector> hl, hr;
        const Matrix* V = nullptr;
        if (arch == Architecture::BiRNN) {
            const auto& p = std::get<BiRnnParams>(params);
            hl = literal_rnn_dir(p.left, xs, cfg.rnn_bias);
            hr = reversed(literal_rnn_dir(p.right, reversed(xs), cfg.rnn_bias));
            V = &p.V;
        } else if (arch == Architecture::BiLSTM) {
            const auto& p = std::get<LstmParams>(params);
            hl = literal_lstm_dir(p.left, xs);
            hr = reversed(literal_lstm_dir(p.right, reversed(xs)));
            V = &p.V;
        } else {
            const auto& p = std::get<GruParams>(params);
            hl = literal_gru_dir(p.left, xs);
            hr = reversed(literal_gru_dir(p.right, reversed(xs)));
            V = &p.V;
        }
        const auto want = literal_output(*V, hl, hr);
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t j = 0; j < want[t].size(); ++j)
                CHECK(fwd.scores[t][j] == doctest::Approx(want[t][j]).epsilon(1e-12));
    }
}

TEST_CASE("window network concatenates the padded window") {
    Rng rng(4);
    EncoderConfig cfg = make_config(Architecture::WindowNN, 2, 3, 2);
    cfg.window = 5;
    const EncoderParams params = init_params(cfg, rng);
    const auto& p = std::get<WindowNnParams>(params);
    const std::vector<Vector> xs = random_inputs(rng, 3, 2);

    const EncoderForward fwd = forward(params, cfg, xs);
    CHECK(fwd.scores.size() == 3);
    // token 0 of a 3-token sentence: [padL, padL, x0, x1, x2]
    Vector cat;
    for (const Vector* v : {&p.pad_left, &p.pad_left, &xs[0], &xs[1], &xs[2]})
        cat.insert(cat.end(), v->begin(), v->end());
    const Vector want = mv(p.V, th(plus(mv(p.H, cat), p.bh)));
    for (std::size_t j = 0; j < want.size(); ++j)
        CHECK(fwd.scores[0][j] == doctest::Approx(want[j]).epsilon(1e-12));
}

TEST_CASE("output shape contract holds for every architecture") {
    Rng rng(5);
    for (const Architecture arch : {Architecture::BiRNN, Architecture::BiLSTM, Architecture::BiGRU,
                                    Architecture::WindowNN}) {
        const EncoderConfig cfg = make_config(arch, 3, 4, 5);
        const EncoderParams params = init_params(cfg, rng);
        const std::vector<Vector> xs = random_inputs(rng, 6, 3);
        const EncoderForward fwd = forward(params, cfg, xs);
        CHECK(fwd.scores.size() == 6);
        for (const auto& z : fwd.scores) CHECK(z.size() == 5);
    }
    const EncoderConfig bad = make_config(Architecture::BiRNN, 4, 4, 5);
    Rng rng2(6);
    const EncoderParams params = init_params(bad, rng2);
    CHECK_THROWS_AS(forward(params, bad, random_inputs(rng2, 3, 2)), std::invalid_argument);
}

TEST_CASE("zero score gradients give zero parameter gradients") {
    Rng rng(7);
    for (const Architecture arch : {Architecture::BiRNN, Architecture::BiLSTM, Architecture::BiGRU,
                                    Architecture::WindowNN}) {
        const EncoderConfig cfg = make_config(arch, 3, 3, 2);
        const EncoderParams params = init_params(cfg, rng);
        const std::vector<Vector> xs = random_inputs(rng, 4, 3);
        const EncoderForward fwd = forward(params, cfg, xs);
        const std::vector<Vector> zero(4, Vector(2, 0.0));
        EncoderBackward back = backward(params, cfg, fwd.trace, zero);
        for (const auto& ref : param_refs(back.grads))
            for (std::size_t i = 0; i < ref.size; ++i) CHECK(ref.data[i] == 0.0);
        for (const auto& dx : back.dx)
            for (double v : dx) CHECK(v == 0.0);
    }
}

TEST_CASE("backward matches central finite differences for every architecture") {
    Rng rng(8);
    for (const Architecture arch : {Architecture::BiRNN, Architecture::BiLSTM, Architecture::BiGRU,
                                    Architecture::WindowNN}) {
        const EncoderConfig cfg = make_config(arch, 2, 3, 2);
        EncoderParams params = init_params(cfg, rng);
        std::vector<Vector> xs = random_inputs(rng, 4, 2);
        std::vector<Vector> us(4);
        for (auto& u : us) u = rng.uniform_vec(2, -1.0, 1.0);

        auto loss = [&]() {
            const EncoderForward fwd = forward(params, cfg, xs);
            double acc = 0.0;
            for (std::size_t t = 0; t < us.size(); ++t) acc += dot(us[t], fwd.scores[t]);
            return acc;
        };

        const EncoderForward fwd = forward(params, cfg, xs);
        EncoderBackward back = backward(params, cfg, fwd.trace, us);

        const double h = 1e-5;
        auto fd_check = [&](double analytic, double* slot) {
            const double saved = *slot;
            *slot = saved + h;
            const double fp = loss();
            *slot = saved - h;
            const double fm = loss();
            *slot = saved;
            const double numeric = (fp - fm) / (2 * h);
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
            CHECK(std::abs(analytic - numeric) / denom < 1e-4);
        };

        auto prefs = param_refs(params);
        auto grefs = param_refs(back.grads);
        REQUIRE(prefs.size() == grefs.size());
        for (std::size_t i = 0; i < prefs.size(); ++i)
            for (std::size_t k = 0; k < prefs[i].size; ++k)
                fd_check(grefs[i].data[k], prefs[i].data + k);

        // feature gradients too
        for (std::size_t t = 0; t < xs.size(); ++t)
            for (std::size_t k = 0; k < xs[t].size(); ++k) fd_check(back.dx[t][k], &xs[t][k]);
    }
}

TEST_CASE("window feature gradients stay inside the window") {
    Rng rng(9);
    EncoderConfig cfg = make_config(Architecture::WindowNN, 2, 3, 2);
    cfg.window = 5;
    const EncoderParams params = init_params(cfg, rng);
    const std::size_t n = 9;
    const std::vector<Vector> xs = random_inputs(rng, n, 2);
    const EncoderForward fwd = forward(params, cfg, xs);

    // inject gradient only at position t = 4; only |t - s| <= 2 may move
    std::vector<Vector> us(n, Vector(2, 0.0));
    us[4] = {1.0, -0.5};
    const EncoderBackward back = backward(params, cfg, fwd.trace, us);
    for (std::size_t s = 0; s < n; ++s) {
        double mag = 0.0;
        for (double v : back.dx[s]) mag += std::abs(v);
        if (s >= 2 && s <= 6)
            CHECK(mag > 0.0);
        else
            CHECK(mag == 0.0);
    }
}

TEST_CASE("count_params worked example and the four-gate relation") {
    EncoderConfig rnn = make_config(Architecture::BiRNN, 2, 3, 2);
    CHECK(count_params(rnn) == 54);

    // LSTM gate block is exactly four RNN recurrence blocks; both share V
    EncoderConfig lstm = make_config(Architecture::BiLSTM, 2, 3, 2);
    const std::size_t nh = 3, ni = 2, no = 2;
    const std::size_t rnn_block = nh * ni + nh * nh + nh;  // U, W, b per direction
    const std::size_t v_size = no * 2 * nh;
    CHECK(count_params(lstm) == 2 * (4 * rnn_block + 2 * nh) + v_size);
    CHECK(count_params(rnn) == 2 * (rnn_block + nh) + v_size);

    EncoderConfig no_bias = rnn;
    no_bias.rnn_bias = false;
    CHECK(count_params(no_bias) == 54 - 6);
}

TEST_CASE("count_params equals the sum of allocated tensor sizes") {
    Rng rng(10);
    for (int it = 0; it < 30; ++it) {
        EncoderConfig cfg;
        cfg.arch = static_cast<Architecture>(rng.next_index(4));
        cfg.n_in = 1 + static_cast<int>(rng.next_index(6));
        cfg.n_hidden = 1 + static_cast<int>(rng.next_index(6));
        cfg.n_out = 1 + static_cast<int>(rng.next_index(5));
        cfg.window = 3 + 2 * static_cast<int>(rng.next_index(2));
        cfg.rnn_bias = rng.next_double() < 0.5;
        EncoderParams params = init_params(cfg, rng);
        std::size_t total = 0;
        for (const auto& ref : param_refs(params)) total += ref.size;
        CHECK(total == count_params(cfg));
    }
}

TEST_CASE("direction symmetry: swapped blocks on the reversed sentence") {
    Rng rng(11);
    for (const Architecture arch : {Architecture::BiRNN, Architecture::BiLSTM, Architecture::BiGRU}) {
        for (int it = 0; it < 20; ++it) {
            const EncoderConfig cfg = make_config(arch, 3, 4, 3);
            const EncoderParams params = init_params(cfg, rng);
            const std::size_t n = 1 + rng.next_index(6);
            const std::vector<Vector> xs = random_inputs(rng, n, 3);

            const EncoderForward fwd = forward(params, cfg, xs);
            const EncoderParams swapped = swap_directions(params);
            const EncoderForward rev = forward(swapped, cfg, reversed(xs));
            for (std::size_t t = 0; t < n; ++t)
                for (std::size_t j = 0; j < 3; ++j)
                    CHECK(fwd.scores[t][j] == rev.scores[n - 1 - t][j]); // bit-exact
        }
    }
}

TEST_CASE("LSTM hidden states are bounded by one") {
    Rng rng(12);
    const EncoderConfig cfg = make_config(Architecture::BiLSTM, 3, 5, 2);
    const EncoderParams params = init_params(cfg, rng);
    for (int it = 0; it < 100; ++it) {
        const std::vector<Vector> xs = random_inputs(rng, 1 + rng.next_index(8), 3, 5.0);
        const EncoderForward fwd = forward(params, cfg, xs);
        const auto& tr = std::get<LstmTrace>(fwd.trace.detail);
        for (const auto& h : tr.left.h)
            for (double v : h) CHECK(std::abs(v) <= 1.0);
        for (const auto& h : tr.right.h)
            for (double v : h) CHECK(std::abs(v) <= 1.0);
    }
}

TEST_CASE("GRU states interpolate between candidate and previous state") {
    Rng rng(13);
    const EncoderConfig cfg = make_config(Architecture::BiGRU, 3, 4, 2);
    const EncoderParams params = init_params(cfg, rng);
    for (int it = 0; it < 100; ++it) {
        const std::vector<Vector> xs = random_inputs(rng, 1 + rng.next_index(6), 3, 3.0);
        const EncoderForward fwd = forward(params, cfg, xs);
        const auto& tr = std::get<GruTrace>(fwd.trace.detail);
        for (const GruDirTrace* dir : {&tr.left, &tr.right}) {
            for (std::size_t p = 0; p + 1 < dir->h.size(); ++p) {
                for (std::size_t j = 0; j < dir->h[p].size(); ++j) {
                    const double lo = std::min(dir->htil[p][j], dir->h[p][j]);
                    const double hi = std::max(dir->htil[p][j], dir->h[p][j]);
                    CHECK(dir->h[p + 1][j] >= lo - 1e-12);
                    CHECK(dir->h[p + 1][j] <= hi + 1e-12);
                }
            }
        }
    }
}
