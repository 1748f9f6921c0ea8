#include "seqtag/checkpoint.hpp"
#include "seqtag/crf.hpp"
#include "seqtag/data.hpp"
#include "seqtag/evaluation.hpp"
#include "seqtag/model.hpp"
#include "seqtag/ncbi.hpp"
#include "seqtag/training.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace {

using namespace seqtag;

TagSet infer_tagset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    std::set<std::string> classes;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        const std::string tag = line.substr(tab + 1);
        if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-')
            classes.insert(tag.substr(2));
    }
    return TagSet::for_classes({classes.begin(), classes.end()});
}

TagSet tagset_for(const std::string& task, const std::string& corpus_path) {
    if (task == "a") return TagSet::task_a();
    if (task == "b") return TagSet::task_b();
    if (task == "auto") return infer_tagset(corpus_path);
    throw std::runtime_error("unknown task: " + task + " (expected a, b or auto)");
}

std::string fmt(double v, int prec = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

void print_eval(std::ostream& out, const EvalResult& r, const TagSet& tagset, bool structured,
                bool macro) {
    if (structured) {
        out << "tp " << r.tp << " fp " << r.fp << " fn " << r.fn << " precision "
            << fmt(100 * r.precision) << " recall " << fmt(100 * r.recall) << " f1 "
            << fmt(100 * r.f1) << "\n";
        for (std::size_t c = 0; c < tagset.classes.size(); ++c) {
            const auto& cr = r.per_class[c];
            out << "class " << tagset.classes[c] << " tp " << cr.tp << " fp " << cr.fp << " fn "
                << cr.fn << " precision " << fmt(100 * cr.precision) << " recall "
                << fmt(100 * cr.recall) << " f1 " << fmt(100 * cr.f1) << "\n";
        }
        if (macro) out << "macro_f1 " << fmt(100 * r.macro_f1) << "\n";
        return;
    }
    out << "Class                 Precision   Recall   F1 Score\n";
    if (tagset.classes.size() > 1) {
        for (std::size_t c = 0; c < tagset.classes.size(); ++c) {
            const auto& cr = r.per_class[c];
            char line[160];
            std::snprintf(line, sizeof(line), "%-22s %9.2f %8.2f %10.2f\n",
                          tagset.classes[c].c_str(), 100 * cr.precision, 100 * cr.recall,
                          100 * cr.f1);
            out << line;
        }
    }
    char line[160];
    std::snprintf(line, sizeof(line), "%-22s %9.2f %8.2f %10.2f\n", "overall (micro)",
                  100 * r.precision, 100 * r.recall, 100 * r.f1);
    out << line;
    if (macro) {
        std::snprintf(line, sizeof(line), "%-22s %30.2f\n", "overall (macro)", 100 * r.macro_f1);
        out << line;
    }
}

// ---- convert ----

struct ConvertArgs {
    std::string input, output, task = "b";
};

void run_convert(const ConvertArgs& a) {
    const TagSet b = TagSet::task_b();
    const auto docs = parse_ncbi_file(a.input);
    const auto converted = convert_ncbi(docs, b);
    Corpus corpus = to_corpus(converted);
    TagSet ts = b;
    if (a.task == "a") {
        auto [flat, ta] = flatten_to_task_a(corpus, b);
        corpus = std::move(flat);
        ts = ta;
    } else if (a.task != "b") {
        throw std::runtime_error("convert: task must be a or b");
    }
    write_conll_file(a.output, corpus, ts);
    std::cout << "documents " << docs.size() << " sentences " << corpus.size() << " -> " << a.output
              << "\n";
}

// ---- stats ----

struct StatsArgs {
    std::string data, task = "auto";
    bool repair_bio = false;
};

void run_stats(const StatsArgs& a) {
    const TagSet ts = tagset_for(a.task, a.data);
    const Corpus corpus = parse_conll_file(a.data, ts, {a.repair_bio});
    const CorpusStats stats = corpus_stats(corpus, ts);
    std::cout << "sentences " << stats.sentences << "\n";
    std::cout << "mentions " << stats.mentions << "\n";
    for (std::size_t c = 0; c < ts.classes.size(); ++c)
        std::cout << ts.classes[c] << " " << stats.per_class[c] << "\n";
}

// ---- train ----

struct TrainArgs {
    std::string train_path, dev_path, task = "auto";
    std::string arch = "bilstm", features = "we+ce";
    std::string out = "model.ckpt", report, save_vocab;
    std::string vectors, init = "", word_norm = "lower+digits", rare_token = "<RARE>";
    int epochs = 50, hidden = 100, patience = 5, min_freq = 1;
    int d_we = 50, d_chr = 100, d_ce = 25, char_window = 3, nn_window = 5;
    double lr = 0.02, clip = 5.0;
    std::uint64_t seed = 1;
    bool no_shuffle = false, no_clip = false, freeze_words = false, repair_bio = false;
    bool no_rnn_bias = false;
};

TrainConfig to_train_config(const TrainArgs& a) {
    TrainConfig cfg;
    cfg.epochs = a.epochs;
    cfg.seed = a.seed;
    cfg.lr = a.lr;
    cfg.shuffle = !a.no_shuffle;
    cfg.clip_norm = a.no_clip ? 0.0 : a.clip;
    cfg.patience = a.patience;
    cfg.model.arch = architecture_from_name(a.arch);
    cfg.model.regime = regime_from_name(a.features);
    cfg.model.n_hidden = a.hidden;
    cfg.model.dims = {a.d_we, a.d_chr, a.d_ce, a.char_window};
    cfg.model.nn_window = a.nn_window;
    cfg.model.rnn_bias = !a.no_rnn_bias;
    cfg.model.update_word_vectors = !a.freeze_words;
    cfg.model.vectors_path = a.vectors;
    cfg.model.word_norm = word_norm_from_name(a.word_norm);
    cfg.model.rare_token = a.rare_token;
    std::string init = a.init;
    if (init.empty()) init = a.vectors.empty() ? "random" : "pretrained";
    cfg.model.word_init = word_init_from_name(init);
    return cfg;
}

std::string config_snapshot(const TrainConfig& cfg) {
    std::ostringstream out;
    out << "epochs " << cfg.epochs << "\n"
        << "seed " << cfg.seed << "\n"
        << "lr " << cfg.lr << "\n"
        << "shuffle " << (cfg.shuffle ? 1 : 0) << "\n"
        << "clip_norm " << cfg.clip_norm << "\n"
        << "patience " << cfg.patience << "\n"
        << "arch " << architecture_name(cfg.model.arch) << "\n"
        << "features " << regime_name(cfg.model.regime) << "\n"
        << "n_hidden " << cfg.model.n_hidden << "\n"
        << "word_init " << word_init_name(cfg.model.word_init) << "\n"
        << "word_norm " << word_norm_name(cfg.model.word_norm) << "\n"
        << "update_word_vectors " << (cfg.model.update_word_vectors ? 1 : 0) << "\n";
    return out.str();
}

void run_train(const TrainArgs& a) {
    const TagSet ts = tagset_for(a.task, a.train_path);
    Corpus train_corpus = parse_conll_file(a.train_path, ts, {a.repair_bio});
    Corpus dev_corpus = parse_conll_file(a.dev_path, ts, {a.repair_bio});

    const TrainConfig cfg = to_train_config(a);
    auto [words, chars] = build_vocabularies(train_corpus, a.min_freq, cfg.model.word_norm);

    TrainResult result = train(train_corpus, dev_corpus, ts, words, chars, cfg);

    save_checkpoint(a.out, result.model, config_snapshot(cfg));
    const std::string report_path = a.report.empty() ? a.out + ".report" : a.report;
    write_report(report_path, result.report);
    if (!a.save_vocab.empty()) {
        save_vocabulary(words, a.save_vocab + ".words");
        save_vocabulary(chars, a.save_vocab + ".chars");
    }

    for (const auto& row : result.report.rows)
        std::cout << "epoch " << row.epoch << " loss " << fmt(row.mean_nll, 6) << " dev_f1 "
                  << fmt(100 * row.dev_f1) << "\n";
    std::cout << "best_epoch " << result.report.best_epoch << " best_dev_f1 "
              << fmt(100 * result.report.best_f1) << "\n";
    std::cerr << "wall_seconds " << fmt(result.report.wall_seconds) << "\n";
}

// ---- eval ----

struct EvalArgs {
    std::string model, data;
    bool structured = false, constrain_bio = false, macro = false;
};

void run_eval(const EvalArgs& a) {
    LoadedCheckpoint ckpt = load_checkpoint(a.model);
    Corpus corpus = parse_conll_file(a.data, ckpt.model.tagset, {});
    assign_ids(corpus, ckpt.model.word_vocab, ckpt.model.char_vocab, ckpt.model.word_norm);
    const EvalResult r = evaluate_model(ckpt.model, corpus, {a.constrain_bio});
    print_eval(std::cout, r, ckpt.model.tagset, a.structured, a.macro);
}

// ---- tag ----

struct TagArgs {
    std::string model, input = "-";
    bool constrain_bio = false;
};

void run_tag(const TagArgs& a) {
    LoadedCheckpoint ckpt = load_checkpoint(a.model);
    const Model& model = ckpt.model;

    std::ifstream file;
    std::istream* in = &std::cin;
    if (a.input != "-") {
        file.open(a.input, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open input: " + a.input);
        in = &file;
    }

    std::vector<std::vector<std::string>> sentences(1);
    std::string line;
    while (std::getline(*in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (!sentences.back().empty()) sentences.emplace_back();
            continue;
        }
        const auto tab = line.find('\t');
        sentences.back().push_back(tab == std::string::npos ? line : line.substr(0, tab));
    }
    if (sentences.back().empty()) sentences.pop_back();

    for (const auto& tokens : sentences) {
        TaggedSentence s;
        s.tokens = tokens;
        s.gold_tags.assign(tokens.size(), model.tagset.o_index());
        Corpus one{s};
        assign_ids(one, model.word_vocab, model.char_vocab, model.word_norm);
        const auto tags = tag_sentence(model, one[0], {a.constrain_bio});
        for (std::size_t i = 0; i < tokens.size(); ++i)
            std::cout << tokens[i] << "\t" << model.tagset.tags[tags[i]] << "\n";
        std::cout << "\n";
    }
}

// ---- gradcheck ----

struct GradcheckArgs {
    std::string arch = "all", features = "all";
    double tolerance = 1e-4, crf_tolerance = 1e-6;
    std::uint64_t seed = 12345;
    int hidden = 4, length = 4;
};

bool report_gradcheck(const GradCheckReport& rep, const std::string& label) {
    for (const auto& row : rep.rows) {
        char buf[200];
        std::snprintf(buf, sizeof(buf), "%s %-18s max_rel_err %.3e (%zu entries) [%s]\n",
                      row.pass ? "PASS" : "FAIL", row.tensor.c_str(), row.max_rel_err, row.checked,
                      label.c_str());
        std::cout << buf;
    }
    if (rep.resamples > 0)
        std::cout << "note: resampled " << rep.resamples << " degenerate point(s) [" << label
                  << "]\n";
    return rep.pass;
}

void run_gradcheck(const GradcheckArgs& a) {
    bool all_pass = true;

    std::vector<std::string> archs;
    if (a.arch == "all")
        archs = {"crf", "birnn", "bilstm", "bigru", "nn"};
    else
        archs = {a.arch};
    std::vector<std::string> regimes;
    if (a.features == "all")
        regimes = {"ce", "we", "we+ce"};
    else
        regimes = {a.features};

    for (const auto& arch : archs) {
        if (arch == "crf") {
            GradCheckConfig cfg;
            cfg.crf_only = true;
            cfg.seed = a.seed;
            cfg.tolerance = a.crf_tolerance;
            cfg.sentence_len = a.length;
            all_pass = report_gradcheck(grad_check(cfg), "crf only") && all_pass;
            continue;
        }
        for (const auto& regime : regimes) {
            GradCheckConfig cfg;
            cfg.arch = architecture_from_name(arch);
            cfg.regime = regime_from_name(regime);
            cfg.n_hidden = a.hidden;
            cfg.sentence_len = a.length;
            cfg.seed = a.seed;
            cfg.tolerance = a.tolerance;
            all_pass = report_gradcheck(grad_check(cfg), arch + " " + regime) && all_pass;
        }
    }
    if (!all_pass) throw std::runtime_error("gradient check failed");
    std::cout << "all gradient checks passed\n";
}

// ---- matrix ----

struct MatrixArgs {
    std::string train_path, dev_path, test_path, task = "auto";
    std::string cells; // "bilstm:we+ce,nn:we"; empty = archs x features product
    std::string archs = "nn,birnn,bigru,bilstm", features = "we";
    std::string seeds = "1";
    std::string out;
    std::string vectors, init = "";
    int epochs = 50, hidden = 100, patience = 5, jobs = 1;
    double lr = 0.02;
    bool freeze_words = false;
};

struct Cell {
    Architecture arch;
    FeatureRegime regime;
    std::string name;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void run_matrix(const MatrixArgs& a) {
    const TagSet ts = tagset_for(a.task, a.train_path);
    Corpus train_corpus = parse_conll_file(a.train_path, ts, {});
    Corpus dev_corpus = parse_conll_file(a.dev_path, ts, {});
    Corpus test_corpus = parse_conll_file(a.test_path, ts, {});
    auto [words, chars] = build_vocabularies(train_corpus, 1);

    std::string init = a.init;
    if (init.empty()) init = a.vectors.empty() ? "random" : "pretrained";
    const WordInit word_init = word_init_from_name(init);

    std::vector<Cell> cells;
    auto add_cell = [&](const std::string& arch, const std::string& regime) {
        Cell c;
        c.arch = architecture_from_name(arch);
        c.regime = regime_from_name(regime);
        std::string feat = regime_name(c.regime);
        if (word_init == WordInit::Random && c.regime == FeatureRegime::WE) feat = "RV";
        c.name = std::string(architecture_name(c.arch)) + "+" + feat;
        for (const auto& prev : cells)
            if (prev.name == c.name) throw std::runtime_error("duplicate experiment cell: " + c.name);
        cells.push_back(c);
    };
    if (!a.cells.empty()) {
        for (const auto& cell : split_list(a.cells)) {
            const auto colon = cell.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("bad cell spec (want arch:features): " + cell);
            add_cell(cell.substr(0, colon), cell.substr(colon + 1));
        }
    } else {
        for (const auto& arch : split_list(a.archs))
            for (const auto& feat : split_list(a.features)) add_cell(arch, feat);
    }

    std::vector<std::uint64_t> seeds;
    for (const auto& s : split_list(a.seeds)) seeds.push_back(std::stoull(s));
    if (seeds.empty()) seeds.push_back(1);

    struct Job {
        std::size_t cell, seed_slot;
    };
    std::vector<Job> jobs_list;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t s = 0; s < seeds.size(); ++s) jobs_list.push_back({c, s});

    struct JobResult {
        bool ok = false;
        std::string error;
        EvalResult dev, test;
    };
    std::vector<JobResult> results(jobs_list.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs_list.size()) return;
            const Job job = jobs_list[j];
            try {
                TrainConfig cfg;
                cfg.epochs = a.epochs;
                // each cell owns its stream: spec seed plus cell index
                cfg.seed = seeds[job.seed_slot] + static_cast<std::uint64_t>(job.cell);
                cfg.lr = a.lr;
                cfg.patience = a.patience;
                cfg.model.arch = cells[job.cell].arch;
                cfg.model.regime = cells[job.cell].regime;
                cfg.model.n_hidden = a.hidden;
                cfg.model.word_init = word_init;
                cfg.model.vectors_path = a.vectors;
                cfg.model.update_word_vectors = !a.freeze_words;
                TrainResult tr = train(train_corpus, dev_corpus, ts, words, chars, cfg);
                Corpus dev_ids = dev_corpus, test_ids = test_corpus;
                assign_ids(dev_ids, words, chars);
                assign_ids(test_ids, words, chars);
                results[j].dev = evaluate_model(tr.model, dev_ids);
                results[j].test = evaluate_model(tr.model, test_ids);
                results[j].ok = true;
            } catch (const std::exception& e) {
                results[j].error = e.what();
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(a.jobs, static_cast<int>(jobs_list.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::ostringstream table;
    const std::string task_label = ts.classes.size() == 1 ? "A" : "B";
    table << "Task  Model                Val P   Val R   Val F1  Test P  Test R  Test F1\n";
    for (std::size_t c = 0; c < cells.size(); ++c) {
        double dp = 0, dr = 0, df = 0, tp = 0, trc = 0, tf = 0;
        std::size_t ok = 0;
        std::string error;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const auto& r = results[c * seeds.size() + s];
            if (!r.ok) {
                error = r.error;
                continue;
            }
            ++ok;
            dp += r.dev.precision;
            dr += r.dev.recall;
            df += r.dev.f1;
            tp += r.test.precision;
            trc += r.test.recall;
            tf += r.test.f1;
        }
        char line[256];
        if (ok == 0) {
            std::snprintf(line, sizeof(line), "%-5s %-20s FAILED: %s\n", task_label.c_str(),
                          cells[c].name.c_str(), error.c_str());
        } else {
            const double k = static_cast<double>(ok);
            std::snprintf(line, sizeof(line), "%-5s %-20s %-7.2f %-7.2f %-7.2f %-7.2f %-7.2f %-7.2f\n",
                          task_label.c_str(), cells[c].name.c_str(), 100 * dp / k, 100 * dr / k,
                          100 * df / k, 100 * tp / k, 100 * trc / k, 100 * tf / k);
        }
        table << line;
    }

    if (a.out.empty()) {
        std::cout << table.str();
    } else {
        std::ofstream out(a.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write table: " + a.out);
        out << table.str();
        std::cout << "wrote " << a.out << "\n";
    }
    for (const auto& r : results)
        if (!r.ok && !r.error.empty()) std::cerr << "cell failure: " << r.error << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"neural sequence labeler: BIO tagging with RNN encoders and a CRF output layer"};
    app.require_subcommand(1);
    app.set_config("--config");

    ConvertArgs conv;
    auto* c_conv = app.add_subcommand("convert", "convert an NCBI-format corpus to CoNLL TSV");
    c_conv->add_option("--input", conv.input, "NCBI corpus text file")->required();
    c_conv->add_option("--output", conv.output, "output TSV path")->required();
    c_conv->add_option("--task", conv.task, "a (single class) or b (four classes)");

    StatsArgs stats;
    auto* c_stats = app.add_subcommand("stats", "corpus statistics (sentences, mentions per class)");
    c_stats->add_option("--data", stats.data, "CoNLL TSV corpus")->required();
    c_stats->add_option("--task", stats.task, "a, b or auto");
    c_stats->add_flag("--repair-bio", stats.repair_bio, "turn orphan I-x tags into B-x");

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "train a tagging model");
    c_train->add_option("--train", tr.train_path, "training TSV")->required();
    c_train->add_option("--dev", tr.dev_path, "development TSV")->required();
    c_train->add_option("--task", tr.task, "a, b or auto");
    c_train->add_option("--arch", tr.arch, "birnn | bilstm | bigru | nn");
    c_train->add_option("--features", tr.features, "ce | we | we+ce");
    c_train->add_option("--out", tr.out, "checkpoint path");
    c_train->add_option("--report", tr.report, "per-epoch report path (default <out>.report)");
    c_train->add_option("--epochs", tr.epochs);
    c_train->add_option("--lr", tr.lr, "Adagrad learning rate");
    c_train->add_option("--seed", tr.seed);
    c_train->add_option("--hidden", tr.hidden, "encoder hidden size");
    c_train->add_option("--patience", tr.patience, "early-stop patience on dev F1 (0 = off)");
    c_train->add_option("--min-freq", tr.min_freq, "word vocabulary frequency cutoff");
    c_train->add_option("--clip", tr.clip, "global gradient norm clip");
    c_train->add_flag("--no-clip", tr.no_clip, "disable gradient clipping");
    c_train->add_flag("--no-shuffle", tr.no_shuffle, "visit sentences in corpus order");
    c_train->add_flag("--repair-bio", tr.repair_bio);
    c_train->add_flag("--no-rnn-bias", tr.no_rnn_bias, "bias-free plain-RNN recurrence");
    c_train->add_option("--vectors", tr.vectors, "pretrained word vectors (text format)");
    c_train->add_option("--init-word-vectors", tr.init, "pretrained | zeros | random");
    c_train->add_option("--rare-token", tr.rare_token,
                        "rare-word token to look for in the vector file");
    c_train->add_flag("--freeze-word-vectors", tr.freeze_words, "do not update word vectors");
    c_train->add_option("--d-we", tr.d_we, "word embedding dimension");
    c_train->add_option("--d-chr", tr.d_chr, "character embedding dimension");
    c_train->add_option("--d-ce", tr.d_ce, "character-level word embedding dimension");
    c_train->add_option("--char-window", tr.char_window, "character CNN filter length");
    c_train->add_option("--nn-window", tr.nn_window, "window size for the nn architecture");
    c_train->add_option("--save-vocab", tr.save_vocab,
                        "also write <prefix>.words and <prefix>.chars vocabulary files");
    c_train->add_option("--word-norm", tr.word_norm,
                        "token normalization for word lookup: none | lower | lower+digits");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "evaluate a checkpoint on a gold TSV");
    c_eval->add_option("--model", ev.model, "checkpoint path")->required();
    c_eval->add_option("--data", ev.data, "gold TSV")->required();
    c_eval->add_flag("--structured", ev.structured, "machine-readable output");
    c_eval->add_flag("--constrain-bio", ev.constrain_bio, "forbid invalid BIO transitions");
    c_eval->add_flag("--macro", ev.macro, "also report macro-averaged F1");

    TagArgs tg;
    auto* c_tag = app.add_subcommand("tag", "tag tokenized text (one token per line)");
    c_tag->add_option("--model", tg.model, "checkpoint path")->required();
    c_tag->add_option("--input", tg.input, "input file, - for stdin");
    c_tag->add_flag("--constrain-bio", tg.constrain_bio);

    GradcheckArgs gc;
    auto* c_gc = app.add_subcommand("gradcheck", "analytic vs. central-difference gradients");
    c_gc->add_option("--arch", gc.arch, "all | crf | birnn | bilstm | bigru | nn");
    c_gc->add_option("--features", gc.features, "all | ce | we | we+ce");
    c_gc->add_option("--tolerance", gc.tolerance);
    c_gc->add_option("--crf-tolerance", gc.crf_tolerance);
    c_gc->add_option("--seed", gc.seed);
    c_gc->add_option("--hidden", gc.hidden);
    c_gc->add_option("--length", gc.length, "probe sentence length");

    MatrixArgs mx;
    auto* c_mx = app.add_subcommand("matrix", "run an architecture x features experiment grid");
    c_mx->add_option("--train", mx.train_path)->required();
    c_mx->add_option("--dev", mx.dev_path)->required();
    c_mx->add_option("--test", mx.test_path)->required();
    c_mx->add_option("--task", mx.task, "a, b or auto");
    c_mx->add_option("--cells", mx.cells, "explicit cells, e.g. bilstm:we+ce,nn:ce");
    c_mx->add_option("--archs", mx.archs, "architectures for the product grid");
    c_mx->add_option("--features", mx.features, "feature regimes for the product grid");
    c_mx->add_option("--seeds", mx.seeds, "comma-separated seeds, averaged in the table");
    c_mx->add_option("--jobs", mx.jobs, "parallel worker slots");
    c_mx->add_option("--epochs", mx.epochs);
    c_mx->add_option("--lr", mx.lr);
    c_mx->add_option("--hidden", mx.hidden);
    c_mx->add_option("--patience", mx.patience);
    c_mx->add_option("--vectors", mx.vectors);
    c_mx->add_option("--init-word-vectors", mx.init);
    c_mx->add_flag("--freeze-word-vectors", mx.freeze_words);
    c_mx->add_option("--out", mx.out, "write the table to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(c_conv)) run_convert(conv);
        else if (app.got_subcommand(c_stats)) run_stats(stats);
        else if (app.got_subcommand(c_train)) run_train(tr);
        else if (app.got_subcommand(c_eval)) run_eval(ev);
        else if (app.got_subcommand(c_tag)) run_tag(tg);
        else if (app.got_subcommand(c_gc)) run_gradcheck(gc);
        else if (app.got_subcommand(c_mx)) run_matrix(mx);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
