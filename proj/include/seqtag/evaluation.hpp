#pragma once

#include "seqtag/data.hpp"

#include <set>
#include <string>
#include <vector>

namespace seqtag {

struct Span {
    int sentence;
    int start;
    int end; // inclusive
    int cls;
    bool operator<(const Span& o) const {
        if (sentence != o.sentence) return sentence < o.sentence;
        if (start != o.start) return start < o.start;
        if (end != o.end) return end < o.end;
        return cls < o.cls;
    }
    bool operator==(const Span& o) const {
        return sentence == o.sentence && start == o.start && end == o.end && cls == o.cls;
    }
};

using SpanSet = std::set<Span>;

// Lenient decode: an I-x with no matching open span starts one, and an I-y
// inside an x span terminates the x span. Predictions may be BIO-invalid;
// gold corpora decode identically because they are valid.
std::vector<Span> decode_spans(const std::vector<int>& tags, const TagSet& tagset,
                               int sentence_id);

SpanSet corpus_spans(const std::vector<std::vector<int>>& tag_rows, const TagSet& tagset);

struct ClassResult {
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct EvalResult {
    std::size_t tp = 0, fp = 0, fn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0; // micro
    double macro_f1 = 0.0;
    std::vector<ClassResult> per_class;
};

// Exact matching: a prediction counts only when sentence, boundaries and
// class all agree with a gold span. Partial overlaps cost both an fp and an fn.
EvalResult evaluate(const SpanSet& gold, const SpanSet& pred, std::size_t n_classes);

enum class ErrorKind { BoundaryError, ClassError, Miss, Spurious };

struct ErrorItem {
    Span span;
    bool is_fp = false; // otherwise fn
    ErrorKind kind = ErrorKind::Miss;
    bool acronym_like = false; // any all-caps token of <= 6 chars inside the span
    std::string text;
};

std::vector<ErrorItem> error_report(const SpanSet& gold, const SpanSet& pred,
                                    const Corpus& sentences);

const char* error_kind_name(ErrorKind k);

} // namespace seqtag
