#include "seqtag/evaluation.hpp"

#include <algorithm>
#include <cctype>

namespace seqtag {

std::vector<Span> decode_spans(const std::vector<int>& tags, const TagSet& tagset,
                               int sentence_id) {
    std::vector<Span> out;
    int open_cls = -1;
    int open_start = -1;

    auto close = [&](int end) {
        if (open_cls >= 0) out.push_back({sentence_id, open_start, end, open_cls});
        open_cls = -1;
    };

    for (std::size_t i = 0; i < tags.size(); ++i) {
        const int t = tags[i];
        if (t == tagset.o_index()) {
            close(static_cast<int>(i) - 1);
        } else if (tagset.is_b(t)) {
            close(static_cast<int>(i) - 1);
            open_cls = tagset.class_of(t);
            open_start = static_cast<int>(i);
        } else { // I-x
            const int cls = tagset.class_of(t);
            if (open_cls != cls) { // includes "no open span": I opens one
                close(static_cast<int>(i) - 1);
                open_cls = cls;
                open_start = static_cast<int>(i);
            }
        }
    }
    close(static_cast<int>(tags.size()) - 1);
    return out;
}

SpanSet corpus_spans(const std::vector<std::vector<int>>& tag_rows, const TagSet& tagset) {
    SpanSet out;
    for (std::size_t s = 0; s < tag_rows.size(); ++s)
        for (const auto& sp : decode_spans(tag_rows[s], tagset, static_cast<int>(s)))
            out.insert(sp);
    return out;
}

namespace {

void finish(ClassResult& r) {
    r.precision = (r.tp + r.fp) == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
    r.recall = (r.tp + r.fn) == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    r.f1 = (r.precision + r.recall) == 0.0 ? 0.0
                                           : 2.0 * r.precision * r.recall / (r.precision + r.recall);
}

} // namespace

EvalResult evaluate(const SpanSet& gold, const SpanSet& pred, std::size_t n_classes) {
    EvalResult res;
    res.per_class.assign(n_classes, ClassResult{});

    for (const auto& sp : pred) {
        const bool hit = gold.count(sp) != 0;
        auto& cls = res.per_class[static_cast<std::size_t>(sp.cls)];
        if (hit) {
            ++res.tp;
            ++cls.tp;
        } else {
            ++res.fp;
            ++cls.fp;
        }
    }
    for (const auto& sp : gold) {
        if (!pred.count(sp)) {
            ++res.fn;
            ++res.per_class[static_cast<std::size_t>(sp.cls)].fn;
        }
    }

    ClassResult micro{res.tp, res.fp, res.fn, 0, 0, 0};
    finish(micro);
    res.precision = micro.precision;
    res.recall = micro.recall;
    res.f1 = micro.f1;

    double macro = 0.0;
    for (auto& c : res.per_class) {
        finish(c);
        macro += c.f1;
    }
    res.macro_f1 = n_classes == 0 ? 0.0 : macro / static_cast<double>(n_classes);
    return res;
}

namespace {

bool overlaps(const Span& a, const Span& b) {
    return a.sentence == b.sentence && a.start <= b.end && b.start <= a.end;
}

bool same_extent(const Span& a, const Span& b) {
    return a.sentence == b.sentence && a.start == b.start && a.end == b.end;
}

bool looks_like_acronym(const std::string& tok) {
    if (tok.empty() || tok.size() > 6) return false;
    bool has_upper = false;
    for (char c : tok) {
        const unsigned char u = static_cast<unsigned char>(c);
        if (std::islower(u)) return false;
        if (std::isupper(u)) has_upper = true;
    }
    return has_upper;
}

ErrorItem categorize(const Span& sp, bool is_fp, const SpanSet& other, const Corpus& sentences) {
    ErrorItem item;
    item.span = sp;
    item.is_fp = is_fp;

    bool extent_match = false;
    bool any_overlap = false;
    for (const auto& o : other) {
        if (o.sentence > sp.sentence) break;
        if (same_extent(sp, o)) extent_match = true;
        if (overlaps(sp, o)) any_overlap = true;
    }
    if (extent_match)
        item.kind = ErrorKind::ClassError;
    else if (any_overlap)
        item.kind = ErrorKind::BoundaryError;
    else
        item.kind = is_fp ? ErrorKind::Spurious : ErrorKind::Miss;

    if (sp.sentence >= 0 && static_cast<std::size_t>(sp.sentence) < sentences.size()) {
        const auto& toks = sentences[static_cast<std::size_t>(sp.sentence)].tokens;
        for (int i = sp.start; i <= sp.end && static_cast<std::size_t>(i) < toks.size(); ++i) {
            if (i > sp.start) item.text += " ";
            item.text += toks[static_cast<std::size_t>(i)];
            if (looks_like_acronym(toks[static_cast<std::size_t>(i)])) item.acronym_like = true;
        }
    }
    return item;
}

} // namespace

std::vector<ErrorItem> error_report(const SpanSet& gold, const SpanSet& pred,
                                    const Corpus& sentences) {
    std::vector<ErrorItem> out;
    for (const auto& sp : pred)
        if (!gold.count(sp)) out.push_back(categorize(sp, true, gold, sentences));
    for (const auto& sp : gold)
        if (!pred.count(sp)) out.push_back(categorize(sp, false, pred, sentences));
    std::sort(out.begin(), out.end(), [](const ErrorItem& a, const ErrorItem& b) {
        if (!(a.span == b.span)) return a.span < b.span;
        return a.is_fp > b.is_fp;
    });
    return out;
}

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::BoundaryError: return "boundary-error";
        case ErrorKind::ClassError: return "class-error";
        case ErrorKind::Miss: return "miss";
        case ErrorKind::Spurious: return "spurious";
    }
    return "?";
}

} // namespace seqtag
