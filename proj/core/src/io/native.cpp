#include "fqlens/io/native.hpp"

#include "fqlens/error.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace fqlens::io {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, 4);
}

void put_str(std::ostream& out, const std::string& s) {
    if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw FormatError("metadata string too long for the FQL1 container");
    }
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {
        // Remaining size, when the stream is seekable, bounds every allocation.
        const auto here = in_.tellg();
        if (here != std::streampos(-1)) {
            in_.seekg(0, std::ios::end);
            const auto end = in_.tellg();
            in_.seekg(here);
            if (end != std::streampos(-1)) {
                remaining_ = static_cast<std::uint64_t>(end - here);
                bounded_ = true;
            }
        }
    }

    void bytes(char* dst, std::size_t n, const char* what) {
        if (bounded_ && n > remaining_) truncated(what);
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) truncated(what);
        if (bounded_) remaining_ -= n;
    }

    std::uint64_t u64(const char* what) {
        unsigned char b[8];
        bytes(reinterpret_cast<char*>(b), 8, what);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    std::uint32_t u32(const char* what) {
        unsigned char b[4];
        bytes(reinterpret_cast<char*>(b), 4, what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }

    std::uint8_t u8(const char* what) {
        char c;
        bytes(&c, 1, what);
        return static_cast<std::uint8_t>(c);
    }

    std::string str(const char* what) {
        const std::uint32_t n = u32(what);
        std::string s(n, '\0');
        if (n) bytes(s.data(), n, what);
        return s;
    }

    void require(std::uint64_t n, const char* what) {
        if (bounded_ && n > remaining_) truncated(what);
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    [[noreturn]] static void truncated(const char* what) {
        throw FormatError(std::string("FQL1: truncated payload while reading ") + what);
    }

    std::istream& in_;
    std::uint64_t remaining_ = 0;
    bool bounded_ = false;
};

}  // namespace

void write_native(const HaplotypePanel& panel, std::ostream& out) {
    out.write(kNativeMagic, 4);
    const std::uint64_t n_hap = panel.n_haplotypes();
    const std::uint64_t n_loci = panel.n_loci();
    put_u64(out, n_hap);
    put_u64(out, n_loci);

    const std::size_t row_bytes = (n_loci + 7) / 8;
    std::vector<char> buf(row_bytes);
    const auto& m = panel.alleles();
    for (std::size_t r = 0; r < n_hap; ++r) {
        const auto words = m.row(r);
        for (std::size_t i = 0; i < row_bytes; ++i) {
            buf[i] = static_cast<char>((words[i / 8] >> (8 * (i % 8))) & 0xFF);
        }
        out.write(buf.data(), static_cast<std::streamsize>(row_bytes));
    }
    for (const auto& h : panel.haplotypes()) {
        put_str(out, h.sample_id);
        out.put(static_cast<char>(h.haplotype_index));
        put_str(out, h.population);
    }
    for (const auto& l : panel.loci()) {
        put_str(out, l.chromosome);
        put_u64(out, l.position);
        put_str(out, l.id);
    }
    if (!out) throw FormatError("FQL1: write failed");
}

void write_native(const HaplotypePanel& panel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot create " + path.string());
    write_native(panel, out);
}

HaplotypePanel read_native(std::istream& in) {
    Reader rd(in);
    char magic[4];
    rd.bytes(magic, 4, "magic");
    if (std::memcmp(magic, kNativeMagic, 4) != 0) throw FormatError("FQL1: bad magic bytes");
    const std::uint64_t n_hap = rd.u64("haplotype count");
    const std::uint64_t n_loci = rd.u64("locus count");

    const std::uint64_t row_bytes = n_loci / 8 + (n_loci % 8 != 0);
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    if (n_hap != 0 && row_bytes > kMax / n_hap) throw FormatError("FQL1: count overflow");
    // Every haplotype and locus record needs at least 9 and 12 bytes of metadata.
    if (n_hap > kMax / 16 || n_loci > kMax / 16) throw FormatError("FQL1: count overflow");
    rd.require(n_hap * row_bytes, "allele matrix");
    rd.require(n_hap * row_bytes + n_hap * 9 + n_loci * 12, "metadata");

    BitMatrix m(n_hap, n_loci);
    std::vector<char> buf(row_bytes);
    const unsigned pad_bits = static_cast<unsigned>(row_bytes * 8 - n_loci);
    for (std::uint64_t r = 0; r < n_hap; ++r) {
        rd.bytes(buf.data(), row_bytes, "allele matrix");
        auto words = m.row(r);
        for (std::size_t i = 0; i < row_bytes; ++i) {
            words[i / 8] |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * (i % 8));
        }
        if (pad_bits) {
            const auto last = static_cast<unsigned char>(buf[row_bytes - 1]);
            if (last >> (8 - pad_bits)) throw FormatError("FQL1: nonzero padding bits");
        }
    }

    std::vector<HaplotypeMeta> haps(n_hap);
    for (auto& h : haps) {
        h.sample_id = rd.str("haplotype metadata");
        h.haplotype_index = rd.u8("haplotype metadata");
        h.population = rd.str("haplotype metadata");
    }
    std::vector<LocusMeta> loci(n_loci);
    for (auto& l : loci) {
        l.chromosome = rd.str("locus metadata");
        l.position = rd.u64("locus metadata");
        l.id = rd.str("locus metadata");
    }
    if (!rd.at_end()) throw FormatError("FQL1: trailing bytes after locus metadata");
    try {
        return HaplotypePanel(std::move(haps), std::move(loci), std::move(m));
    } catch (const ConfigError& e) {
        throw FormatError(std::string("FQL1: invalid panel: ") + e.what());
    }
}

HaplotypePanel read_native(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return read_native(in);
}

bool is_native_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    return in.read(magic, 4) && std::memcmp(magic, kNativeMagic, 4) == 0;
}

}  // namespace fqlens::io
