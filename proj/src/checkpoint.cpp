#include "seqtag/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace seqtag {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

void put_str(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

class Reader {
public:
    explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::string raw(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw std::runtime_error("checkpoint: truncated file");
    }
    std::string bytes_;
    std::size_t pos_ = 0;
};

std::string meta_text(const Model& model) {
    std::ostringstream out;
    out << "arch " << architecture_name(model.enc_config.arch) << "\n";
    out << "regime " << regime_name(model.regime) << "\n";
    out << "word_norm " << word_norm_name(model.word_norm) << "\n";
    out << "d_we " << model.dims.d_we << "\n";
    out << "d_chr " << model.dims.d_chr << "\n";
    out << "d_ce " << model.dims.d_ce << "\n";
    out << "char_window " << model.dims.char_window << "\n";
    out << "n_hidden " << model.enc_config.n_hidden << "\n";
    out << "nn_window " << model.enc_config.window << "\n";
    out << "rnn_bias " << (model.enc_config.rnn_bias ? 1 : 0) << "\n";
    out << "update_word_vectors " << (model.words.trainable ? 1 : 0) << "\n";
    return out.str();
}

std::map<std::string, std::string> parse_meta(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string key, value;
    while (in >> key >> value) kv[key] = value;
    return kv;
}

std::string vocab_payload(const Vocabulary& v) {
    std::string out;
    put_u32(out, static_cast<std::uint32_t>(v.items.size()));
    for (const auto& s : v.items) put_str(out, s);
    return out;
}

Vocabulary read_vocab(Reader& r) {
    const std::uint32_t n = r.u32();
    Vocabulary v;
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::string item = r.str();
        if (i < 3) {
            if (item != v.items[i]) throw std::runtime_error("checkpoint: corrupt vocabulary header");
        } else {
            v.add(item);
        }
    }
    return v;
}

} // namespace

void save_checkpoint(const std::string& path, Model& model, const std::string& config_text) {
    std::string body;

    auto add_section = [&body](const std::string& name, const std::string& payload) {
        put_str(body, name);
        put_u64(body, payload.size());
        body += payload;
    };

    add_section("meta", meta_text(model));

    {
        std::string p;
        put_u32(p, static_cast<std::uint32_t>(model.tagset.classes.size()));
        for (const auto& c : model.tagset.classes) put_str(p, c);
        add_section("tagset", p);
    }
    add_section("word_vocab", vocab_payload(model.word_vocab));
    add_section("char_vocab", vocab_payload(model.char_vocab));
    add_section("config", config_text);

    {
        std::string p;
        auto refs = model.param_refs();
        put_u32(p, static_cast<std::uint32_t>(refs.size()));
        for (const auto& ref : refs) {
            put_str(p, ref.name);
            put_u64(p, ref.rows);
            put_u64(p, ref.cols);
            for (std::size_t i = 0; i < ref.size; ++i) put_f64(p, ref.data[i]);
        }
        add_section("tensors", p);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, 4);
    std::string head;
    put_u32(head, kVersion);
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);

    Reader r(bytes.substr(4));
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw std::runtime_error("checkpoint version " + std::to_string(version) +
                                 " is not supported (expected " + std::to_string(kVersion) + ")");

    std::map<std::string, std::string> sections;
    std::vector<std::string> order;
    while (!r.done()) {
        const std::string name = r.str();
        const std::uint64_t len = r.u64();
        sections[name] = r.raw(len);
        order.push_back(name);
    }
    for (const char* required : {"meta", "tagset", "word_vocab", "char_vocab", "config", "tensors"})
        if (!sections.count(required))
            throw std::runtime_error("checkpoint: missing section " + std::string(required));

    const auto meta = parse_meta(sections["meta"]);
    auto meta_int = [&meta](const std::string& key) {
        auto it = meta.find(key);
        if (it == meta.end()) throw std::runtime_error("checkpoint: meta key missing: " + key);
        return std::stoi(it->second);
    };

    LoadedCheckpoint loaded;
    loaded.config_text = sections["config"];

    {
        Reader tr(sections["tagset"]);
        const std::uint32_t n = tr.u32();
        std::vector<std::string> classes;
        for (std::uint32_t i = 0; i < n; ++i) classes.push_back(tr.str());
        loaded.model.tagset = TagSet::for_classes(classes);
    }
    {
        Reader vr(sections["word_vocab"]);
        loaded.model.word_vocab = read_vocab(vr);
    }
    {
        Reader vr(sections["char_vocab"]);
        loaded.model.char_vocab = read_vocab(vr);
    }

    Model& m = loaded.model;
    m.regime = regime_from_name(meta.at("regime"));
    m.word_norm = word_norm_from_name(meta.at("word_norm"));
    m.dims.d_we = meta_int("d_we");
    m.dims.d_chr = meta_int("d_chr");
    m.dims.d_ce = meta_int("d_ce");
    m.dims.char_window = meta_int("char_window");
    m.enc_config.arch = architecture_from_name(meta.at("arch"));
    m.enc_config.n_in = m.input_dim();
    m.enc_config.n_hidden = meta_int("n_hidden");
    m.enc_config.n_out = static_cast<int>(m.tagset.size());
    m.enc_config.window = meta_int("nn_window");
    m.enc_config.rnn_bias = meta_int("rnn_bias") != 0;
    m.words.trainable = meta_int("update_word_vectors") != 0;

    // allocate tensors, then fill by name
    if (m.uses_words())
        m.words.M = Matrix(static_cast<std::size_t>(m.dims.d_we), m.word_vocab.size());
    if (m.uses_chars()) {
        m.chars.M = Matrix(static_cast<std::size_t>(m.dims.d_chr), m.char_vocab.size());
        m.cnn.window = m.dims.char_window;
        m.cnn.W = Matrix(static_cast<std::size_t>(m.dims.d_ce),
                         static_cast<std::size_t>(m.dims.d_chr) * m.dims.char_window);
        m.cnn.b = Vector(static_cast<std::size_t>(m.dims.d_ce), 0.0);
    }
    Rng dummy(0);
    m.encoder = init_params(m.enc_config, dummy);
    m.trans = make_transitions(m.tagset.size());

    auto refs = m.param_refs();
    Reader tsr(sections["tensors"]);
    const std::uint32_t count = tsr.u32();
    if (count != refs.size())
        throw std::runtime_error("checkpoint: expected " + std::to_string(refs.size()) +
                                 " tensors, file has " + std::to_string(count));
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = tsr.str();
        const std::uint64_t rows = tsr.u64();
        const std::uint64_t cols = tsr.u64();
        if (name != refs[i].name || rows != refs[i].rows || cols != refs[i].cols)
            throw std::runtime_error("checkpoint: tensor mismatch at " + name + " (expected " +
                                     refs[i].name + " " + std::to_string(refs[i].rows) + "x" +
                                     std::to_string(refs[i].cols) + ")");
        for (std::size_t k = 0; k < refs[i].size; ++k) refs[i].data[k] = tsr.f64();
    }
    return loaded;
}

} // namespace seqtag
