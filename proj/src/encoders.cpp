#include "seqtag/encoders.hpp"

#include <cmath>
#include <stdexcept>

namespace seqtag {

const char* architecture_name(Architecture a) {
    switch (a) {
        case Architecture::BiRNN: return "Bi-RNN";
        case Architecture::BiLSTM: return "Bi-LSTM";
        case Architecture::BiGRU: return "Bi-GRU";
        case Architecture::WindowNN: return "NN";
    }
    return "?";
}

Architecture architecture_from_name(const std::string& name) {
    if (name == "birnn" || name == "rnn" || name == "Bi-RNN") return Architecture::BiRNN;
    if (name == "bilstm" || name == "lstm" || name == "Bi-LSTM") return Architecture::BiLSTM;
    if (name == "bigru" || name == "gru" || name == "Bi-GRU") return Architecture::BiGRU;
    if (name == "nn" || name == "window" || name == "NN") return Architecture::WindowNN;
    throw std::invalid_argument("unknown architecture: " + name);
}

namespace {

Vector small_uniform(std::size_t n, Rng& rng) { return rng.uniform_vec(n, -0.01, 0.01); }

std::vector<const Vector*> order_view(const std::vector<Vector>& xs, bool reversed) {
    std::vector<const Vector*> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        out[i] = reversed ? &xs[xs.size() - 1 - i] : &xs[i];
    return out;
}

void check_inputs(const EncoderConfig& cfg, const std::vector<Vector>& xs) {
    if (xs.empty()) throw std::invalid_argument("encoder forward: empty sentence");
    for (const auto& x : xs)
        if (static_cast<int>(x.size()) != cfg.n_in)
            shape_error("encoder forward: feature length " + std::to_string(x.size()) +
                        " but config n_in is " + std::to_string(cfg.n_in));
}

void check_arch(const EncoderConfig& cfg, const EncoderParams& params) {
    const std::size_t want = static_cast<std::size_t>(cfg.arch);
    if (params.index() != want)
        throw std::invalid_argument("encoder: parameters do not match the configured architecture");
}

// z = V (hl : hr), the two halves accumulated separately so that swapping
// the halves of V commutes bit-exactly with swapping the directions.
Vector output_scores(const Matrix& V, const Vector& hl, const Vector& hr) {
    const std::size_t nh = hl.size();
    if (V.cols() != 2 * nh) shape_error("output layer: V width != 2 * hidden");
    Vector z(V.rows());
    for (std::size_t r = 0; r < V.rows(); ++r) {
        const double* row = V.row(r);
        double accl = 0.0, accr = 0.0;
        for (std::size_t c = 0; c < nh; ++c) accl += row[c] * hl[c];
        for (std::size_t c = 0; c < nh; ++c) accr += row[nh + c] * hr[c];
        z[r] = accl + accr;
    }
    return z;
}

void output_backward(const Matrix& V, const Vector& hl, const Vector& hr, const Vector& dz,
                     Matrix& dV, Vector& dhl, Vector& dhr) {
    const std::size_t nh = hl.size();
    dhl.assign(nh, 0.0);
    dhr.assign(nh, 0.0);
    for (std::size_t r = 0; r < V.rows(); ++r) {
        const double* row = V.row(r);
        double* drow = dV.row(r);
        const double s = dz[r];
        for (std::size_t c = 0; c < nh; ++c) {
            drow[c] += s * hl[c];
            drow[nh + c] += s * hr[c];
            dhl[c] += row[c] * s;
            dhr[c] += row[nh + c] * s;
        }
    }
}

Vector dtanh_from_out(const Vector& dh, const Vector& h) {
    Vector da(dh.size());
    for (std::size_t i = 0; i < dh.size(); ++i) da[i] = dh[i] * (1.0 - h[i] * h[i]);
    return da;
}

Vector dsigmoid_from_out(const Vector& dg, const Vector& g) {
    Vector da(dg.size());
    for (std::size_t i = 0; i < dg.size(); ++i) da[i] = dg[i] * g[i] * (1.0 - g[i]);
    return da;
}

// ---- plain RNN direction ----

RnnDirTrace rnn_dir_forward(const RnnDir& d, const std::vector<const Vector*>& xs, bool bias) {
    RnnDirTrace tr;
    tr.h.resize(xs.size() + 1);
    tr.h[0] = d.h0;
    for (std::size_t p = 0; p < xs.size(); ++p) {
        Vector a = matvec(d.U, *xs[p]);
        vadd_inplace(a, matvec(d.W, tr.h[p]));
        if (bias) vadd_inplace(a, d.b);
        tr.h[p + 1] = vtanh(a);
    }
    return tr;
}

void rnn_dir_backward(const RnnDir& d, const std::vector<const Vector*>& xs, const RnnDirTrace& tr,
                      const std::vector<Vector>& inject, bool bias, RnnDir& g,
                      std::vector<Vector>& dx) {
    const std::size_t n = xs.size();
    dx.assign(n, Vector());
    Vector carry(d.h0.size(), 0.0);
    for (std::size_t p = n; p-- > 0;) {
        Vector dh = inject[p];
        vadd_inplace(dh, carry);
        const Vector da = dtanh_from_out(dh, tr.h[p + 1]);
        add_outer(g.U, da, *xs[p]);
        add_outer(g.W, da, tr.h[p]);
        if (bias) vadd_inplace(g.b, da);
        dx[p] = matvec_t(d.U, da);
        carry = matvec_t(d.W, da);
    }
    vadd_inplace(g.h0, carry);
}

// ---- LSTM direction ----

LstmDirTrace lstm_dir_forward(const LstmDir& d, const std::vector<const Vector*>& xs) {
    const std::size_t n = xs.size();
    LstmDirTrace tr;
    tr.i.resize(n);
    tr.f.resize(n);
    tr.o.resize(n);
    tr.g.resize(n);
    tr.c.resize(n + 1);
    tr.h.resize(n + 1);
    tr.c[0] = d.c0;
    tr.h[0] = d.h0;
    for (std::size_t p = 0; p < n; ++p) {
        const Vector& x = *xs[p];
        const Vector& hp = tr.h[p];
        tr.i[p] = vsigmoid(vadd(vadd(matvec(d.Ui, x), matvec(d.Wi, hp)), d.bi));
        tr.f[p] = vsigmoid(vadd(vadd(matvec(d.Uf, x), matvec(d.Wf, hp)), d.bf));
        tr.o[p] = vsigmoid(vadd(vadd(matvec(d.Uo, x), matvec(d.Wo, hp)), d.bo));
        tr.g[p] = vtanh(vadd(vadd(matvec(d.Ug, x), matvec(d.Wg, hp)), d.bg));
        tr.c[p + 1] = vadd(vmul(tr.c[p], tr.f[p]), vmul(tr.g[p], tr.i[p]));
        tr.h[p + 1] = vmul(vtanh(tr.c[p + 1]), tr.o[p]);
    }
    return tr;
}

void lstm_dir_backward(const LstmDir& d, const std::vector<const Vector*>& xs,
                       const LstmDirTrace& tr, const std::vector<Vector>& inject, LstmDir& g,
                       std::vector<Vector>& dx) {
    const std::size_t n = xs.size();
    const std::size_t nh = d.h0.size();
    dx.assign(n, Vector());
    Vector carry_h(nh, 0.0), carry_c(nh, 0.0);
    for (std::size_t p = n; p-- > 0;) {
        Vector dh = inject[p];
        vadd_inplace(dh, carry_h);
        const Vector& x = *xs[p];
        const Vector& hp = tr.h[p];
        Vector tc = vtanh(tr.c[p + 1]);

        Vector dc(nh), do_(nh);
        for (std::size_t j = 0; j < nh; ++j) {
            do_[j] = dh[j] * tc[j];
            dc[j] = carry_c[j] + dh[j] * tr.o[p][j] * (1.0 - tc[j] * tc[j]);
        }
        Vector di(nh), df(nh), dg(nh);
        for (std::size_t j = 0; j < nh; ++j) {
            df[j] = dc[j] * tr.c[p][j];
            di[j] = dc[j] * tr.g[p][j];
            dg[j] = dc[j] * tr.i[p][j];
            carry_c[j] = dc[j] * tr.f[p][j];
        }
        const Vector dai = dsigmoid_from_out(di, tr.i[p]);
        const Vector daf = dsigmoid_from_out(df, tr.f[p]);
        const Vector dao = dsigmoid_from_out(do_, tr.o[p]);
        const Vector dag = dtanh_from_out(dg, tr.g[p]);

        add_outer(g.Ui, dai, x);
        add_outer(g.Uf, daf, x);
        add_outer(g.Uo, dao, x);
        add_outer(g.Ug, dag, x);
        add_outer(g.Wi, dai, hp);
        add_outer(g.Wf, daf, hp);
        add_outer(g.Wo, dao, hp);
        add_outer(g.Wg, dag, hp);
        vadd_inplace(g.bi, dai);
        vadd_inplace(g.bf, daf);
        vadd_inplace(g.bo, dao);
        vadd_inplace(g.bg, dag);

        Vector dxp = matvec_t(d.Ui, dai);
        vadd_inplace(dxp, matvec_t(d.Uf, daf));
        vadd_inplace(dxp, matvec_t(d.Uo, dao));
        vadd_inplace(dxp, matvec_t(d.Ug, dag));
        dx[p] = std::move(dxp);

        carry_h = matvec_t(d.Wi, dai);
        vadd_inplace(carry_h, matvec_t(d.Wf, daf));
        vadd_inplace(carry_h, matvec_t(d.Wo, dao));
        vadd_inplace(carry_h, matvec_t(d.Wg, dag));
    }
    vadd_inplace(g.h0, carry_h);
    vadd_inplace(g.c0, carry_c);
}

// ---- GRU direction ----

GruDirTrace gru_dir_forward(const GruDir& d, const std::vector<const Vector*>& xs) {
    const std::size_t n = xs.size();
    GruDirTrace tr;
    tr.z.resize(n);
    tr.r.resize(n);
    tr.htil.resize(n);
    tr.s.resize(n);
    tr.h.resize(n + 1);
    tr.h[0] = d.h0;
    for (std::size_t p = 0; p < n; ++p) {
        const Vector& x = *xs[p];
        const Vector& hp = tr.h[p];
        tr.z[p] = vsigmoid(vadd(vadd(matvec(d.Uz, x), matvec(d.Wz, hp)), d.bz));
        tr.r[p] = vsigmoid(vadd(vadd(matvec(d.Ur, x), matvec(d.Wr, hp)), d.br));
        tr.s[p] = vmul(tr.r[p], hp);
        tr.htil[p] = vtanh(vadd(vadd(matvec(d.Uh, x), matvec(d.Wh, tr.s[p])), d.bh));
        Vector h(hp.size());
        for (std::size_t j = 0; j < hp.size(); ++j)
            h[j] = tr.z[p][j] * tr.htil[p][j] + (1.0 - tr.z[p][j]) * hp[j];
        tr.h[p + 1] = std::move(h);
    }
    return tr;
}

void gru_dir_backward(const GruDir& d, const std::vector<const Vector*>& xs, const GruDirTrace& tr,
                      const std::vector<Vector>& inject, GruDir& g, std::vector<Vector>& dx) {
    const std::size_t n = xs.size();
    const std::size_t nh = d.h0.size();
    dx.assign(n, Vector());
    Vector carry(nh, 0.0);
    for (std::size_t p = n; p-- > 0;) {
        Vector dh = inject[p];
        vadd_inplace(dh, carry);
        const Vector& x = *xs[p];
        const Vector& hp = tr.h[p];

        Vector dz(nh), dhtil(nh);
        for (std::size_t j = 0; j < nh; ++j) {
            dz[j] = dh[j] * (tr.htil[p][j] - hp[j]);
            dhtil[j] = dh[j] * tr.z[p][j];
        }
        const Vector daz = dsigmoid_from_out(dz, tr.z[p]);
        const Vector dah = dtanh_from_out(dhtil, tr.htil[p]);
        const Vector ds = matvec_t(d.Wh, dah);
        Vector dr(nh);
        for (std::size_t j = 0; j < nh; ++j) dr[j] = ds[j] * hp[j];
        const Vector dar = dsigmoid_from_out(dr, tr.r[p]);

        add_outer(g.Uz, daz, x);
        add_outer(g.Ur, dar, x);
        add_outer(g.Uh, dah, x);
        add_outer(g.Wz, daz, hp);
        add_outer(g.Wr, dar, hp);
        add_outer(g.Wh, dah, tr.s[p]);
        vadd_inplace(g.bz, daz);
        vadd_inplace(g.br, dar);
        vadd_inplace(g.bh, dah);

        Vector dxp = matvec_t(d.Uz, daz);
        vadd_inplace(dxp, matvec_t(d.Ur, dar));
        vadd_inplace(dxp, matvec_t(d.Uh, dah));
        dx[p] = std::move(dxp);

        carry = matvec_t(d.Wz, daz);
        vadd_inplace(carry, matvec_t(d.Wr, dar));
        for (std::size_t j = 0; j < nh; ++j)
            carry[j] += dh[j] * (1.0 - tr.z[p][j]) + ds[j] * tr.r[p][j];
    }
    vadd_inplace(g.h0, carry);
}

// ---- window baseline ----

Vector window_cat(const WindowNnParams& p, const std::vector<Vector>& xs, int t, int window) {
    const int side = (window - 1) / 2;
    const int n = static_cast<int>(xs.size());
    const std::size_t ni = p.pad_left.size();
    Vector cat;
    cat.reserve(static_cast<std::size_t>(window) * ni);
    for (int off = -side; off <= side; ++off) {
        const int idx = t + off;
        const Vector& src = idx < 0 ? p.pad_left : (idx >= n ? p.pad_right : xs[idx]);
        cat.insert(cat.end(), src.begin(), src.end());
    }
    return cat;
}

} // namespace

EncoderParams init_params(const EncoderConfig& cfg, Rng& rng) {
    const std::size_t ni = static_cast<std::size_t>(cfg.n_in);
    const std::size_t nh = static_cast<std::size_t>(cfg.n_hidden);
    const std::size_t no = static_cast<std::size_t>(cfg.n_out);
    switch (cfg.arch) {
        case Architecture::BiRNN: {
            BiRnnParams p;
            for (RnnDir* d : {&p.left, &p.right}) {
                d->U = scaled_uniform_matrix(nh, ni, rng);
                d->W = scaled_uniform_matrix(nh, nh, rng);
                if (cfg.rnn_bias) d->b = Vector(nh, 0.0);
                d->h0 = small_uniform(nh, rng);
            }
            p.V = scaled_uniform_matrix(no, 2 * nh, rng);
            return p;
        }
        case Architecture::BiLSTM: {
            LstmParams p;
            for (LstmDir* d : {&p.left, &p.right}) {
                for (Matrix* m : {&d->Ui, &d->Uf, &d->Uo, &d->Ug})
                    *m = scaled_uniform_matrix(nh, ni, rng);
                for (Matrix* m : {&d->Wi, &d->Wf, &d->Wo, &d->Wg})
                    *m = scaled_uniform_matrix(nh, nh, rng);
                for (Vector* b : {&d->bi, &d->bf, &d->bo, &d->bg}) *b = Vector(nh, 0.0);
                d->h0 = small_uniform(nh, rng);
                d->c0 = small_uniform(nh, rng);
            }
            p.V = scaled_uniform_matrix(no, 2 * nh, rng);
            return p;
        }
        case Architecture::BiGRU: {
            GruParams p;
            for (GruDir* d : {&p.left, &p.right}) {
                for (Matrix* m : {&d->Uz, &d->Ur, &d->Uh})
                    *m = scaled_uniform_matrix(nh, ni, rng);
                for (Matrix* m : {&d->Wz, &d->Wr, &d->Wh})
                    *m = scaled_uniform_matrix(nh, nh, rng);
                for (Vector* b : {&d->bz, &d->br, &d->bh}) *b = Vector(nh, 0.0);
                d->h0 = small_uniform(nh, rng);
            }
            p.V = scaled_uniform_matrix(no, 2 * nh, rng);
            return p;
        }
        case Architecture::WindowNN: {
            WindowNnParams p;
            p.H = scaled_uniform_matrix(nh, static_cast<std::size_t>(cfg.window) * ni, rng);
            p.bh = Vector(nh, 0.0);
            p.V = scaled_uniform_matrix(no, nh, rng);
            p.pad_left = small_uniform(ni, rng);
            p.pad_right = small_uniform(ni, rng);
            return p;
        }
    }
    throw std::invalid_argument("init_params: bad architecture");
}

EncoderForward forward(const EncoderParams& params, const EncoderConfig& cfg,
                       const std::vector<Vector>& xs) {
    check_inputs(cfg, xs);
    check_arch(cfg, params);
    const std::size_t n = xs.size();
    EncoderForward out;
    out.trace.xs = xs;

    if (const auto* p = std::get_if<WindowNnParams>(&params)) {
        WindowTrace tr;
        tr.cat.resize(n);
        tr.hidden.resize(n);
        out.scores.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            tr.cat[t] = window_cat(*p, xs, static_cast<int>(t), cfg.window);
            Vector a = matvec(p->H, tr.cat[t]);
            vadd_inplace(a, p->bh);
            tr.hidden[t] = vtanh(a);
            out.scores[t] = matvec(p->V, tr.hidden[t]);
        }
        out.trace.detail = std::move(tr);
        return out;
    }

    const auto left_xs = order_view(xs, false);
    const auto right_xs = order_view(xs, true);
    const Matrix* V = nullptr;
    if (const auto* p = std::get_if<BiRnnParams>(&params)) {
        BiRnnTrace tr;
        tr.left = rnn_dir_forward(p->left, left_xs, cfg.rnn_bias);
        tr.right = rnn_dir_forward(p->right, right_xs, cfg.rnn_bias);
        V = &p->V;
        out.scores.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            out.scores[t] = output_scores(*V, tr.left.h[t + 1], tr.right.h[n - t]);
        out.trace.detail = std::move(tr);
    } else if (const auto* p = std::get_if<LstmParams>(&params)) {
        LstmTrace tr;
        tr.left = lstm_dir_forward(p->left, left_xs);
        tr.right = lstm_dir_forward(p->right, right_xs);
        V = &p->V;
        out.scores.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            out.scores[t] = output_scores(*V, tr.left.h[t + 1], tr.right.h[n - t]);
        out.trace.detail = std::move(tr);
    } else if (const auto* p = std::get_if<GruParams>(&params)) {
        GruTrace tr;
        tr.left = gru_dir_forward(p->left, left_xs);
        tr.right = gru_dir_forward(p->right, right_xs);
        V = &p->V;
        out.scores.resize(n);
        for (std::size_t t = 0; t < n; ++t)
            out.scores[t] = output_scores(*V, tr.left.h[t + 1], tr.right.h[n - t]);
        out.trace.detail = std::move(tr);
    }
    return out;
}

EncoderBackward backward(const EncoderParams& params, const EncoderConfig& cfg,
                         const ForwardTrace& trace, const std::vector<Vector>& grad_scores) {
    check_arch(cfg, params);
    const std::vector<Vector>& xs = trace.xs;
    const std::size_t n = xs.size();
    if (grad_scores.size() != n)
        throw std::invalid_argument("encoder backward: trace has " + std::to_string(n) +
                                    " steps but got " + std::to_string(grad_scores.size()) +
                                    " score gradients");

    EncoderBackward out;
    out.grads = zeros_like(params);
    out.dx.assign(n, Vector(static_cast<std::size_t>(cfg.n_in), 0.0));

    if (const auto* p = std::get_if<WindowNnParams>(&params)) {
        const auto& tr = std::get<WindowTrace>(trace.detail);
        auto& g = std::get<WindowNnParams>(out.grads);
        const int side = (cfg.window - 1) / 2;
        const std::size_t ni = static_cast<std::size_t>(cfg.n_in);
        for (std::size_t t = 0; t < n; ++t) {
            add_outer(g.V, grad_scores[t], tr.hidden[t]);
            const Vector dh = matvec_t(p->V, grad_scores[t]);
            const Vector da = dtanh_from_out(dh, tr.hidden[t]);
            add_outer(g.H, da, tr.cat[t]);
            vadd_inplace(g.bh, da);
            const Vector dcat = matvec_t(p->H, da);
            for (int off = -side; off <= side; ++off) {
                const int idx = static_cast<int>(t) + off;
                const std::size_t base = static_cast<std::size_t>(off + side) * ni;
                Vector* dst = idx < 0 ? &g.pad_left
                                      : (idx >= static_cast<int>(n) ? &g.pad_right : &out.dx[idx]);
                for (std::size_t j = 0; j < ni; ++j) (*dst)[j] += dcat[base + j];
            }
        }
        return out;
    }

    const auto left_xs = order_view(xs, false);
    const auto right_xs = order_view(xs, true);
    std::vector<Vector> inj_left(n), inj_right(n);

    auto run_output_backward = [&](const Matrix& V, Matrix& dV, auto hl_at, auto hr_at) {
        for (std::size_t t = 0; t < n; ++t) {
            Vector dhl, dhr;
            output_backward(V, hl_at(t), hr_at(t), grad_scores[t], dV, dhl, dhr);
            inj_left[t] = std::move(dhl);
            inj_right[n - 1 - t] = std::move(dhr);
        }
    };

    std::vector<Vector> dxl, dxr;
    if (const auto* p = std::get_if<BiRnnParams>(&params)) {
        const auto& tr = std::get<BiRnnTrace>(trace.detail);
        auto& g = std::get<BiRnnParams>(out.grads);
        run_output_backward(p->V, g.V, [&](std::size_t t) -> const Vector& { return tr.left.h[t + 1]; },
                            [&](std::size_t t) -> const Vector& { return tr.right.h[n - t]; });
        rnn_dir_backward(p->left, left_xs, tr.left, inj_left, cfg.rnn_bias, g.left, dxl);
        rnn_dir_backward(p->right, right_xs, tr.right, inj_right, cfg.rnn_bias, g.right, dxr);
    } else if (const auto* p = std::get_if<LstmParams>(&params)) {
        const auto& tr = std::get<LstmTrace>(trace.detail);
        auto& g = std::get<LstmParams>(out.grads);
        run_output_backward(p->V, g.V, [&](std::size_t t) -> const Vector& { return tr.left.h[t + 1]; },
                            [&](std::size_t t) -> const Vector& { return tr.right.h[n - t]; });
        lstm_dir_backward(p->left, left_xs, tr.left, inj_left, g.left, dxl);
        lstm_dir_backward(p->right, right_xs, tr.right, inj_right, g.right, dxr);
    } else if (const auto* p = std::get_if<GruParams>(&params)) {
        const auto& tr = std::get<GruTrace>(trace.detail);
        auto& g = std::get<GruParams>(out.grads);
        run_output_backward(p->V, g.V, [&](std::size_t t) -> const Vector& { return tr.left.h[t + 1]; },
                            [&](std::size_t t) -> const Vector& { return tr.right.h[n - t]; });
        gru_dir_backward(p->left, left_xs, tr.left, inj_left, g.left, dxl);
        gru_dir_backward(p->right, right_xs, tr.right, inj_right, g.right, dxr);
    }

    for (std::size_t t = 0; t < n; ++t) {
        vadd_inplace(out.dx[t], dxl[t]);
        vadd_inplace(out.dx[t], dxr[n - 1 - t]); // right dx is in processing order
    }
    return out;
}

std::size_t count_params(const EncoderConfig& cfg) {
    const std::size_t ni = static_cast<std::size_t>(cfg.n_in);
    const std::size_t nh = static_cast<std::size_t>(cfg.n_hidden);
    const std::size_t no = static_cast<std::size_t>(cfg.n_out);
    switch (cfg.arch) {
        case Architecture::BiRNN:
            return 2 * (nh * ni + nh * nh + (cfg.rnn_bias ? nh : 0) + nh) + no * 2 * nh;
        case Architecture::BiLSTM:
            return 2 * (4 * (nh * ni + nh * nh + nh) + 2 * nh) + no * 2 * nh;
        case Architecture::BiGRU:
            return 2 * (3 * (nh * ni + nh * nh + nh) + nh) + no * 2 * nh;
        case Architecture::WindowNN:
            return nh * (static_cast<std::size_t>(cfg.window) * ni) + nh + no * nh + 2 * ni;
    }
    return 0;
}

namespace {

void dir_refs(const std::string& prefix, RnnDir& d, std::vector<TensorRef>& out) {
    out.push_back(ref_of(prefix + ".U", d.U));
    out.push_back(ref_of(prefix + ".W", d.W));
    if (!d.b.empty()) out.push_back(ref_of(prefix + ".b", d.b));
    out.push_back(ref_of(prefix + ".h0", d.h0));
}

void dir_refs(const std::string& prefix, LstmDir& d, std::vector<TensorRef>& out) {
    out.push_back(ref_of(prefix + ".U_i", d.Ui));
    out.push_back(ref_of(prefix + ".U_f", d.Uf));
    out.push_back(ref_of(prefix + ".U_o", d.Uo));
    out.push_back(ref_of(prefix + ".U_g", d.Ug));
    out.push_back(ref_of(prefix + ".W_i", d.Wi));
    out.push_back(ref_of(prefix + ".W_f", d.Wf));
    out.push_back(ref_of(prefix + ".W_o", d.Wo));
    out.push_back(ref_of(prefix + ".W_g", d.Wg));
    out.push_back(ref_of(prefix + ".b_i", d.bi));
    out.push_back(ref_of(prefix + ".b_f", d.bf));
    out.push_back(ref_of(prefix + ".b_o", d.bo));
    out.push_back(ref_of(prefix + ".b_g", d.bg));
    out.push_back(ref_of(prefix + ".h0", d.h0));
    out.push_back(ref_of(prefix + ".c0", d.c0));
}

void dir_refs(const std::string& prefix, GruDir& d, std::vector<TensorRef>& out) {
    out.push_back(ref_of(prefix + ".U_z", d.Uz));
    out.push_back(ref_of(prefix + ".U_r", d.Ur));
    out.push_back(ref_of(prefix + ".U_h", d.Uh));
    out.push_back(ref_of(prefix + ".W_z", d.Wz));
    out.push_back(ref_of(prefix + ".W_r", d.Wr));
    out.push_back(ref_of(prefix + ".W_h", d.Wh));
    out.push_back(ref_of(prefix + ".b_z", d.bz));
    out.push_back(ref_of(prefix + ".b_r", d.br));
    out.push_back(ref_of(prefix + ".b_h", d.bh));
    out.push_back(ref_of(prefix + ".h0", d.h0));
}

} // namespace

std::vector<TensorRef> param_refs(EncoderParams& params) {
    std::vector<TensorRef> out;
    if (auto* p = std::get_if<BiRnnParams>(&params)) {
        dir_refs("enc.left", p->left, out);
        dir_refs("enc.right", p->right, out);
        out.push_back(ref_of("enc.V", p->V));
    } else if (auto* p = std::get_if<LstmParams>(&params)) {
        dir_refs("enc.left", p->left, out);
        dir_refs("enc.right", p->right, out);
        out.push_back(ref_of("enc.V", p->V));
    } else if (auto* p = std::get_if<GruParams>(&params)) {
        dir_refs("enc.left", p->left, out);
        dir_refs("enc.right", p->right, out);
        out.push_back(ref_of("enc.V", p->V));
    } else if (auto* p = std::get_if<WindowNnParams>(&params)) {
        out.push_back(ref_of("enc.H", p->H));
        out.push_back(ref_of("enc.b", p->bh));
        out.push_back(ref_of("enc.V", p->V));
        out.push_back(ref_of("enc.pad_left", p->pad_left));
        out.push_back(ref_of("enc.pad_right", p->pad_right));
    }
    return out;
}

EncoderParams zeros_like(const EncoderParams& params) {
    EncoderParams g = params;
    for (auto& ref : param_refs(g)) std::fill(ref.data, ref.data + ref.size, 0.0);
    return g;
}

namespace {

Matrix swap_v_halves(const Matrix& V) {
    const std::size_t nh = V.cols() / 2;
    Matrix out(V.rows(), V.cols());
    for (std::size_t r = 0; r < V.rows(); ++r)
        for (std::size_t c = 0; c < nh; ++c) {
            out(r, c) = V(r, nh + c);
            out(r, nh + c) = V(r, c);
        }
    return out;
}

} // namespace

EncoderParams swap_directions(const EncoderParams& params) {
    EncoderParams out = params;
    if (auto* p = std::get_if<BiRnnParams>(&out)) {
        std::swap(p->left, p->right);
        p->V = swap_v_halves(p->V);
    } else if (auto* p = std::get_if<LstmParams>(&out)) {
        std::swap(p->left, p->right);
        p->V = swap_v_halves(p->V);
    } else if (auto* p = std::get_if<GruParams>(&out)) {
        std::swap(p->left, p->right);
        p->V = swap_v_halves(p->V);
    } else {
        throw std::invalid_argument("swap_directions: window model has no directions");
    }
    return out;
}

} // namespace seqtag
