#include "kacphi/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

namespace kacphi {

namespace {

constexpr char kMagic[4] = {'K', 'P', 'L', '2'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::istream& is, const char* what) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), 4)) {
        std::ostringstream msg;
        msg << "snapshot: truncated while reading " << what << " at byte offset "
            << is.gcount();
        throw std::runtime_error(msg.str());
    }
    return v;
}

} // namespace

void write_snapshot(std::ostream& os, const TorusField& f) {
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(f.n()));
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    if (!os) throw std::runtime_error("snapshot: write failed");
}

TorusField read_snapshot(std::istream& is) {
    char magic[4] = {};
    if (!is.read(magic, 4))
        throw std::runtime_error("snapshot: truncated while reading magic at byte offset 0");
    if (std::memcmp(magic, kMagic, 4) != 0) {
        std::ostringstream msg;
        msg << "snapshot: bad magic, expected \"KPL2\" but found \""
            << std::string(magic, magic + 4) << "\"";
        throw std::runtime_error(msg.str());
    }
    std::uint32_t version = get_u32(is, "version");
    if (version != kVersion) {
        std::ostringstream msg;
        msg << "snapshot: unsupported format version " << version;
        throw std::runtime_error(msg.str());
    }
    std::uint32_t n = get_u32(is, "N");
    if (n == 0 || n > (1u << 15)) throw std::runtime_error("snapshot: implausible N");
    std::size_t count = static_cast<std::size_t>(4) * n * n;
    std::vector<double> values(count);
    std::size_t header = 12;
    if (!is.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(count * sizeof(double)))) {
        std::ostringstream msg;
        msg << "snapshot: truncated payload, expected " << count * sizeof(double)
            << " value bytes, got " << is.gcount() << " (failure at byte offset "
            << header + static_cast<std::size_t>(is.gcount()) << ")";
        throw std::runtime_error(msg.str());
    }
    return TorusField(static_cast<int>(n), std::move(values));
}

void write_snapshot_file(const std::string& path, const TorusField& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open for write: " + path);
    write_snapshot(os, f);
}

TorusField read_snapshot_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open for read: " + path);
    return read_snapshot(is);
}

void write_checkpoint(std::ostream& os, const SpinCheckpoint& c) {
    if (c.spins.size() != c.local_field.size())
        throw std::invalid_argument("checkpoint: spin count must match field size");
    write_snapshot(os, c.local_field);
    std::size_t nbytes = (c.spins.size() + 7) / 8;
    std::vector<unsigned char> bitmap(nbytes, 0);
    for (std::size_t i = 0; i < c.spins.size(); ++i) {
        if (c.spins[i] != 1 && c.spins[i] != -1)
            throw std::invalid_argument("checkpoint: spins must be +-1");
        if (c.spins[i] == 1) bitmap[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
    }
    os.write(reinterpret_cast<const char*>(bitmap.data()),
             static_cast<std::streamsize>(nbytes));
    os.write(reinterpret_cast<const char*>(&c.t_micro), sizeof(double));
    if (!os) throw std::runtime_error("checkpoint: write failed");
}

SpinCheckpoint read_checkpoint(std::istream& is) {
    SpinCheckpoint c{read_snapshot(is), {}, 0.0};
    std::size_t count = c.local_field.size();
    std::size_t nbytes = (count + 7) / 8;
    std::vector<unsigned char> bitmap(nbytes);
    if (!is.read(reinterpret_cast<char*>(bitmap.data()), static_cast<std::streamsize>(nbytes)))
        throw std::runtime_error("checkpoint: truncated spin bitmap");
    c.spins.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        c.spins[i] = (bitmap[i / 8] >> (i % 8)) & 1u ? 1 : -1;
    if (!is.read(reinterpret_cast<char*>(&c.t_micro), sizeof(double)))
        throw std::runtime_error("checkpoint: truncated t_micro");
    return c;
}

void write_checkpoint_file(const std::string& path, const SpinCheckpoint& c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open for write: " + path);
    write_checkpoint(os, c);
}

SpinCheckpoint read_checkpoint_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open for read: " + path);
    return read_checkpoint(is);
}

} // namespace kacphi
