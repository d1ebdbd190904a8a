#pragma once

#include "kacphi/torus_field.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace kacphi {

// Field snapshot, a bit-exact interchange format:
//   bytes 0-3   magic "KPL2"
//   bytes 4-7   format version, u32 little-endian (currently 1)
//   bytes 8-11  N, u32 little-endian
//   then 4N^2 doubles, IEEE-754 binary64 little-endian, row-major with
//   site (x1,x2) at flat index (x1+N-1)*2N + (x2+N-1).
void write_snapshot(std::ostream& os, const TorusField& f);
TorusField read_snapshot(std::istream& is);
void write_snapshot_file(const std::string& path, const TorusField& f);
TorusField read_snapshot_file(const std::string& path);

// Spin checkpoint: a field snapshot of the local field, then the spin bitmap,
// then t_micro.
//   - bitmap: ceil(4N^2/8) bytes; site index i maps to byte i/8, bit i%8
//     (LSB first); bit 1 encodes spin +1, bit 0 encodes spin -1
//   - t_micro: one double, little-endian
struct SpinCheckpoint {
    TorusField local_field;
    std::vector<std::int8_t> spins;
    double t_micro = 0.0;
};
void write_checkpoint(std::ostream& os, const SpinCheckpoint& c);
SpinCheckpoint read_checkpoint(std::istream& is);
void write_checkpoint_file(const std::string& path, const SpinCheckpoint& c);
SpinCheckpoint read_checkpoint_file(const std::string& path);

} // namespace kacphi
