#pragma once

#include "seqtag/data.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace seqtag {

// Raw document from the public NCBI disease corpus text format:
// "PMID|t|title", "PMID|a|abstract", then one tab-separated annotation
// per line (start, end, mention text, category), blank line between docs.
struct NcbiAnnotation {
    int start = 0; // character offsets into title + " " + abstract
    int end = 0;   // exclusive
    std::string text;
    std::string category;
};

struct NcbiDocument {
    std::string id;
    std::string title;
    std::string abstract_text;
    std::vector<NcbiAnnotation> annotations;
};

std::vector<NcbiDocument> parse_ncbi(std::istream& in);
std::vector<NcbiDocument> parse_ncbi_file(const std::string& path);

struct ConvertedToken {
    std::string text;
    int begin = 0; // offsets into the document text, end exclusive
    int end = 0;
    int tag = 0;
};

struct ConvertedSentence {
    std::vector<ConvertedToken> tokens;
};

struct ConvertedDocument {
    std::string id;
    std::string text; // title + " " + abstract
    std::vector<ConvertedSentence> sentences;
};

// Tokenizes (alphanumeric runs; every other non-space char is its own token),
// splits sentences on ./?/! before whitespace + capital/digit, never inside
// an annotated span, and projects annotations onto BIO tags over tokens.
std::vector<ConvertedDocument> convert_ncbi(const std::vector<NcbiDocument>& docs,
                                            const TagSet& tagset);

Corpus to_corpus(const std::vector<ConvertedDocument>& docs);

} // namespace seqtag
