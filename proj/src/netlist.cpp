#include "hvp/netlist/netlist.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace hvp::netlist {

using nlohmann::json;

namespace {

const std::unordered_map<std::string, CellKind>& kindTable()
{
    static const std::unordered_map<std::string, CellKind> table = {
        {"AND", CellKind::And},     {"ANDNOT", CellKind::AndNot},
        {"MUX", CellKind::Mux},     {"NAND", CellKind::Nand},
        {"NOR", CellKind::Nor},     {"NOT", CellKind::Not},
        {"OR", CellKind::Or},       {"ORNOT", CellKind::OrNot},
        {"XNOR", CellKind::Xnor},   {"XOR", CellKind::Xor},
        {"DFF", CellKind::Dff},     {"ROM", CellKind::RomPort},
        {"RAM", CellKind::RamPort}, {"CONST0", CellKind::Const0},
        {"CONST1", CellKind::Const1},
    };
    return table;
}

[[noreturn]] void fail(const std::string& msg)
{
    throw std::runtime_error("netlist: " + msg);
}

std::vector<int> jsonNetArray(const json& j)
{
    std::vector<int> nets;
    for (const auto& x : j)
        nets.push_back(x.get<int>());
    return nets;
}

}  // namespace

const char* cellKindName(CellKind kind)
{
    switch (kind) {
    case CellKind::And:
        return "AND";
    case CellKind::AndNot:
        return "ANDNOT";
    case CellKind::Mux:
        return "MUX";
    case CellKind::Nand:
        return "NAND";
    case CellKind::Nor:
        return "NOR";
    case CellKind::Not:
        return "NOT";
    case CellKind::Or:
        return "OR";
    case CellKind::OrNot:
        return "ORNOT";
    case CellKind::Xnor:
        return "XNOR";
    case CellKind::Xor:
        return "XOR";
    case CellKind::Dff:
        return "DFF";
    case CellKind::RomPort:
        return "ROM";
    case CellKind::RamPort:
        return "RAM";
    case CellKind::Const0:
        return "CONST0";
    case CellKind::Const1:
        return "CONST1";
    }
    return "?";
}

CellKind cellKindFromName(const std::string& name)
{
    auto it = kindTable().find(name);
    if (it == kindTable().end())
        fail("unknown cell kind '" + name + "'");
    return it->second;
}

bool isGate(CellKind kind)
{
    switch (kind) {
    case CellKind::Dff:
    case CellKind::RomPort:
    case CellKind::RamPort:
    case CellKind::Const0:
    case CellKind::Const1:
        return false;
    default:
        return true;
    }
}

Netlist parseNetlist(const std::string& jsonText)
{
    json j;
    try {
        j = json::parse(jsonText);
    }
    catch (const json::parse_error& e) {
        fail(std::string("JSON syntax error: ") + e.what());
    }

    Netlist nl;
    nl.name = j.value("name", "");
    if (j.contains("ports")) {
        for (const auto& p : j["ports"].value("in", json::array())) {
            Port port;
            port.name = p.at("name").get<std::string>();
            port.bits = jsonNetArray(p.at("bits"));
            nl.inputs.push_back(std::move(port));
        }
        for (const auto& p : j["ports"].value("out", json::array())) {
            Port port;
            port.name = p.at("name").get<std::string>();
            port.bits = jsonNetArray(p.at("bits"));
            nl.outputs.push_back(std::move(port));
        }
    }
    for (const auto& c : j.value("cells", json::array())) {
        Cell cell;
        cell.id = c.at("id").get<int>();
        cell.kind = cellKindFromName(c.at("kind").get<std::string>());
        cell.name = c.value("name", "");
        const auto& pins = c.at("pins");
        auto one = [&](const char* pin) {
            if (!pins.contains(pin))
                fail("cell " + std::to_string(cell.id) + " (" +
                     cellKindName(cell.kind) + ") is missing pin '" + pin +
                     "'");
            return pins.at(pin).get<int>();
        };
        switch (cell.kind) {
        case CellKind::Not:
            cell.inputs = {one("a")};
            cell.outputs = {one("y")};
            break;
        case CellKind::Mux:
            cell.inputs = {one("s"), one("a"), one("b")};
            cell.outputs = {one("y")};
            break;
        case CellKind::Dff:
            cell.inputs = {one("d")};
            cell.outputs = {one("q")};
            break;
        case CellKind::Const0:
        case CellKind::Const1:
            cell.outputs = {one("y")};
            break;
        case CellKind::RomPort:
            cell.inputs = jsonNetArray(pins.at("addr"));
            cell.outputs = jsonNetArray(pins.at("rdata"));
            break;
        case CellKind::RamPort: {
            cell.inputs = jsonNetArray(pins.at("addr"));
            const auto wdata = jsonNetArray(pins.at("wdata"));
            cell.inputs.insert(cell.inputs.end(), wdata.begin(), wdata.end());
            cell.inputs.push_back(one("wflag"));
            cell.outputs = jsonNetArray(pins.at("rdata"));
            break;
        }
        default:
            cell.inputs = {one("a"), one("b")};
            cell.outputs = {one("y")};
            break;
        }
        nl.cells.push_back(std::move(cell));
    }

    int maxNet = -1;
    for (const auto& p : nl.inputs)
        for (int b : p.bits)
            maxNet = std::max(maxNet, b);
    for (const auto& p : nl.outputs)
        for (int b : p.bits)
            maxNet = std::max(maxNet, b);
    for (const auto& c : nl.cells) {
        for (int b : c.inputs)
            maxNet = std::max(maxNet, b);
        for (int b : c.outputs)
            maxNet = std::max(maxNet, b);
    }
    nl.netCount = maxNet + 1;

    validateNetlist(nl);
    return nl;
}

std::string netlistToJson(const Netlist& nl)
{
    json j;
    j["name"] = nl.name;
    json in = json::array(), out = json::array();
    for (const auto& p : nl.inputs)
        in.push_back({{"name", p.name},
                      {"width", p.bits.size()},
                      {"bits", p.bits}});
    for (const auto& p : nl.outputs)
        out.push_back({{"name", p.name},
                       {"width", p.bits.size()},
                       {"bits", p.bits}});
    j["ports"] = {{"in", in}, {"out", out}};
    json cells = json::array();
    for (const auto& c : nl.cells) {
        json pins;
        switch (c.kind) {
        case CellKind::Not:
            pins = {{"a", c.inputs[0]}, {"y", c.outputs[0]}};
            break;
        case CellKind::Mux:
            pins = {{"s", c.inputs[0]},
                    {"a", c.inputs[1]},
                    {"b", c.inputs[2]},
                    {"y", c.outputs[0]}};
            break;
        case CellKind::Dff:
            pins = {{"d", c.inputs[0]}, {"q", c.outputs[0]}};
            break;
        case CellKind::Const0:
        case CellKind::Const1:
            pins = {{"y", c.outputs[0]}};
            break;
        case CellKind::RomPort:
            pins = {{"addr", c.inputs}, {"rdata", c.outputs}};
            break;
        case CellKind::RamPort: {
            const size_t w = c.outputs.size();
            const size_t v = c.inputs.size() - w - 1;
            pins = {{"addr", std::vector<int>(c.inputs.begin(),
                                              c.inputs.begin() + v)},
                    {"wdata", std::vector<int>(c.inputs.begin() + v,
                                               c.inputs.begin() + v + w)},
                    {"wflag", c.inputs[v + w]},
                    {"rdata", c.outputs}};
            break;
        }
        default:
            pins = {{"a", c.inputs[0]},
                    {"b", c.inputs[1]},
                    {"y", c.outputs[0]}};
            break;
        }
        json jc = {{"id", c.id}, {"kind", cellKindName(c.kind)},
                   {"pins", pins}};
        if (!c.name.empty())
            jc["name"] = c.name;
        cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    return j.dump();
}

void validateNetlist(const Netlist& nl)
{
    std::unordered_set<int> ids;
    for (const auto& c : nl.cells)
        if (!ids.insert(c.id).second)
            fail("duplicate cell id " + std::to_string(c.id));

    // Single driver per net. Module inputs drive their nets.
    std::vector<int> driver(nl.netCount, -1);  // -2 input port, else cell idx
    for (const auto& p : nl.inputs)
        for (int b : p.bits) {
            if (b < 0 || b >= nl.netCount)
                fail("input port '" + p.name + "' references bad net " +
                     std::to_string(b));
            if (driver[b] != -1)
                fail("multiple drivers on net " + std::to_string(b));
            driver[b] = -2;
        }
    for (size_t i = 0; i < nl.cells.size(); i++) {
        const Cell& c = nl.cells[i];
        const size_t arity = [&]() -> size_t {
            switch (c.kind) {
            case CellKind::Not:
            case CellKind::Dff:
                return 1;
            case CellKind::Mux:
                return 3;
            case CellKind::Const0:
            case CellKind::Const1:
                return 0;
            case CellKind::RomPort:
            case CellKind::RamPort:
                return c.inputs.size();  // widths checked at bind time
            default:
                return 2;
            }
        }();
        if (c.inputs.size() != arity)
            fail("cell " + std::to_string(c.id) + " (" +
                 cellKindName(c.kind) + ") has wrong input count");
        for (int b : c.outputs) {
            if (b < 0 || b >= nl.netCount)
                fail("cell " + std::to_string(c.id) + " drives bad net " +
                     std::to_string(b));
            if (driver[b] != -1)
                fail("multiple drivers on net " + std::to_string(b) +
                     " (cell " + std::to_string(c.id) + ")");
            driver[b] = static_cast<int>(i);
        }
    }
    for (const auto& c : nl.cells)
        for (int b : c.inputs)
            if (b < 0 || b >= nl.netCount || driver[b] == -1)
                fail("dangling input net " + std::to_string(b) + " on cell " +
                     std::to_string(c.id));
    for (const auto& p : nl.outputs)
        for (int b : p.bits)
            if (b < 0 || b >= nl.netCount || driver[b] == -1)
                fail("output port '" + p.name + "' reads undriven net " +
                     std::to_string(b));

    int romCount = 0, ramCount = 0;
    for (const auto& c : nl.cells) {
        if (c.kind == CellKind::RomPort) {
            romCount++;
            if (c.outputs.size() != 32)
                fail("ROM port must have 32 rdata bits");
            if (c.inputs.empty())
                fail("ROM port needs address bits");
        }
        if (c.kind == CellKind::RamPort) {
            ramCount++;
            const size_t w = c.outputs.size();
            if (w == 0 || c.inputs.size() < w + 2)
                fail("RAM port pin widths are inconsistent");
        }
    }
    if (romCount > 1 || ramCount > 1)
        fail("at most one ROM port and one RAM port are supported");

    buildDag(nl);  // detects combinational cycles
}

Dag buildDag(const Netlist& nl)
{
    Dag dag;
    std::vector<int> nodeOfCell(nl.cells.size(), -1);
    for (size_t i = 0; i < nl.cells.size(); i++) {
        const Cell& c = nl.cells[i];
        if (c.kind == CellKind::Dff) {
            dag.dffCells.push_back(static_cast<int>(i));
            continue;
        }
        if (c.kind == CellKind::RomPort)
            dag.romCell = static_cast<int>(i);
        if (c.kind == CellKind::RamPort)
            dag.ramCell = static_cast<int>(i);
        nodeOfCell[i] = static_cast<int>(dag.dagCells.size());
        dag.dagCells.push_back(static_cast<int>(i));
    }

    // Net -> producing DAG node (if combinational).
    std::vector<int> producer(nl.netCount, -1);
    for (size_t i = 0; i < nl.cells.size(); i++)
        if (nodeOfCell[i] >= 0)
            for (int net : nl.cells[i].outputs)
                producer[net] = nodeOfCell[i];

    const size_t n = dag.dagCells.size();
    dag.consumers.assign(n, {});
    dag.indegree.assign(n, 0);
    for (size_t node = 0; node < n; node++) {
        const Cell& c = nl.cells[dag.dagCells[node]];
        for (int net : c.inputs) {
            const int p = producer[net];
            if (p >= 0) {
                dag.consumers[p].push_back(static_cast<int>(node));
                dag.indegree[node]++;
            }
        }
    }

    // Kahn's algorithm; also assigns levels (longest path from sources).
    dag.level.assign(n, 0);
    std::vector<int> indeg = dag.indegree;
    std::queue<int> q;
    for (size_t i = 0; i < n; i++)
        if (indeg[i] == 0)
            q.push(static_cast<int>(i));
    std::vector<int> topo;
    topo.reserve(n);
    while (!q.empty()) {
        const int node = q.front();
        q.pop();
        topo.push_back(node);
        for (int consumer : dag.consumers[node]) {
            dag.level[consumer] =
                std::max(dag.level[consumer], dag.level[node] + 1);
            if (--indeg[consumer] == 0)
                q.push(consumer);
        }
    }
    if (topo.size() != n) {
        for (size_t i = 0; i < n; i++)
            if (indeg[i] > 0)
                fail("combinational cycle through cell " +
                     std::to_string(nl.cells[dag.dagCells[i]].id));
    }

    // Height: longest path to a sink, used as list-scheduling priority.
    dag.height.assign(n, 0);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it)
        for (int consumer : dag.consumers[*it])
            dag.height[*it] =
                std::max(dag.height[*it], dag.height[consumer] + 1);

    std::map<int, int> widthPerLevel;
    int maxLevel = -1;
    for (size_t i = 0; i < n; i++) {
        widthPerLevel[dag.level[i]]++;
        maxLevel = std::max(maxLevel, dag.level[i]);
    }
    dag.gMax = 0;
    for (auto& [lvl, width] : widthPerLevel)
        dag.gMax = std::max(dag.gMax, width);
    dag.depth = maxLevel + 1;
    return dag;
}

NetlistStats netlistStats(const Netlist& nl)
{
    NetlistStats s;
    for (const auto& c : nl.cells) {
        s.countByKind[static_cast<int>(c.kind)]++;
        if (c.kind == CellKind::Dff)
            s.dffCount++;
        else
            s.combCellCount++;
    }
    if (!nl.cells.empty()) {
        Dag dag = buildDag(nl);
        s.gMax = dag.gMax;
        s.depth = dag.depth;
    }
    return s;
}

}  // namespace hvp::netlist
