#ifndef HVP_NETLIST_NETLIST_HPP
#define HVP_NETLIST_NETLIST_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hvp::netlist {

enum class CellKind {
    And,
    AndNot,
    Mux,
    Nand,
    Nor,
    Not,
    Or,
    OrNot,
    Xnor,
    Xor,
    Dff,
    RomPort,
    RamPort,
    Const0,
    Const1,
};

inline constexpr int kNumCellKinds = 15;

const char* cellKindName(CellKind kind);
// Throws std::runtime_error for unknown names.
CellKind cellKindFromName(const std::string& name);

bool isGate(CellKind kind);

// Pin conventions (all nets are single-bit):
//   gates        in {a, b}  (NOT: {a}; MUX: {s, a, b}, y = s ? a : b), out {y}
//   DFF          in {d}, out {q}
//   CONST0/1     out {y}
//   ROM          in addr[va] LSB-first, out rdata[32]
//   RAM          in addr[v] LSB-first, then wdata[w], then wflag; out rdata[w]
struct Cell {
    int id = 0;
    CellKind kind = CellKind::And;
    std::string name;  // optional label (register bits etc.)
    std::vector<int> inputs;
    std::vector<int> outputs;
};

struct Port {
    std::string name;
    std::vector<int> bits;
};

struct Netlist {
    std::string name;
    std::vector<Port> inputs;
    std::vector<Port> outputs;
    std::vector<Cell> cells;
    int netCount = 0;
};

// Parses and validates; throws std::runtime_error with cell/net identifiers
// on syntax errors, unknown kinds, multiple drivers, dangling pins and
// combinational cycles.
Netlist parseNetlist(const std::string& jsonText);
std::string netlistToJson(const Netlist& nl);
void validateNetlist(const Netlist& nl);

// Combinational DAG plus the sequential boundary.
struct Dag {
    // Node i corresponds to combinational cell dagCells[i].
    std::vector<int> dagCells;             // indices into Netlist::cells
    std::vector<std::vector<int>> consumers;  // node -> nodes
    std::vector<int> indegree;             // initial indegrees
    std::vector<int> height;               // longest path to a sink
    std::vector<int> level;                // longest path from the sources
    std::vector<int> dffCells;             // indices into Netlist::cells
    int romCell = -1;
    int ramCell = -1;
    int gMax = 0;   // widest level
    int depth = 0;  // number of levels on the critical path
};

Dag buildDag(const Netlist& nl);

struct NetlistStats {
    std::array<int, kNumCellKinds> countByKind{};
    int dffCount = 0;
    int combCellCount = 0;
    int gMax = 0;
    int depth = 0;
};

NetlistStats netlistStats(const Netlist& nl);

}  // namespace hvp::netlist

#endif
