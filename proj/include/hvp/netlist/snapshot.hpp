#ifndef HVP_NETLIST_SNAPSHOT_HPP
#define HVP_NETLIST_SNAPSHOT_HPP

#include <vector>

#include "hvp/netlist/engine.hpp"

namespace hvp::netlist {

// Snapshot file: magic "HVPS", version, backend tag, parameter-set name,
// netlist name + structural hash, cycle counter, per-DFF values, RAM state
// and an inline copy of the ROM. Loading and continuing is observationally
// identical to never having paused.
inline constexpr char kSnapshotMagic[4] = {'H', 'V', 'P', 'S'};
inline constexpr uint16_t kSnapshotVersion = 1;

std::vector<uint8_t> snapshotSave(const Evaluator<PlainBackend>& ev);
std::vector<uint8_t> snapshotSave(const Evaluator<TfheBackend>& ev);

// Throws std::runtime_error on version, backend, parameter-set or netlist
// mismatch, and on truncated input.
Evaluator<PlainBackend> snapshotLoad(const Netlist& nl, PlainBackend backend,
                                     const std::vector<uint8_t>& bytes);
Evaluator<TfheBackend> snapshotLoad(const Netlist& nl, TfheBackend backend,
                                    const std::vector<uint8_t>& bytes);

// Header utilities shared with the protocol layer.
struct SnapshotInfo {
    std::string backendTag;
    std::string paramName;
    std::string netlistName;
};
SnapshotInfo snapshotPeek(const std::vector<uint8_t>& bytes);

}  // namespace hvp::netlist

#endif
