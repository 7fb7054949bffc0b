#ifndef HVP_NETLIST_ENGINE_HPP
#define HVP_NETLIST_ENGINE_HPP

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hvp/common/parallel.hpp"
#include "hvp/mem/mem.hpp"
#include "hvp/netlist/netlist.hpp"
#include "hvp/tfhe/ops.hpp"

namespace hvp::netlist {

struct CycleStats {
    std::array<uint64_t, kNumCellKinds> evaluatedByKind{};
    int gMax = 0;
    int depth = 0;
    double wallSeconds = 0.0;

    uint64_t evaluatedTotal() const
    {
        uint64_t sum = 0;
        for (uint64_t c : evaluatedByKind)
            sum += c;
        return sum;
    }
};

struct RunOptions {
    unsigned workers = 1;
    // Nonzero: pop random ready nodes instead of highest priority. A test
    // hook; results must not depend on it.
    uint64_t shuffleSeed = 0;
    std::vector<CycleStats>* stats = nullptr;
};

// ---------------------------------------------------------------------------
// Backends

struct PlainBackend {
    using Bit = uint8_t;

    struct Rom {
        std::vector<uint8_t> image;
    };
    struct Ram {
        mem::MemoryGeometry geom;
        std::vector<uint32_t> words;
    };

    static constexpr const char* tag = "plain";

    Bit constant(bool b) const
    {
        return b ? 1 : 0;
    }
    Bit gate(CellKind kind, std::span<const Bit* const> in) const;
    std::vector<Bit> romRead(const Rom& rom,
                             std::span<const Bit* const> addr) const;
    std::vector<Bit> ramCycle(Ram& ram, std::span<const Bit* const> addr,
                              const Bit& wflag,
                              std::span<const Bit* const> wdata) const;
};

struct TfheBackend {
    using Bit = tfhe::Tlwe;

    struct Rom {
        mem::EncryptedRom enc;
    };
    struct Ram {
        mem::EncryptedRam enc;
    };

    static constexpr const char* tag = "tfhe";

    const tfhe::BootstrappingKey* bk = nullptr;
    unsigned threads = 1;

    Bit constant(bool b) const
    {
        return tfhe::tlweTrivial(b, bk->params());
    }
    Bit gate(CellKind kind, std::span<const Bit* const> in) const;
    std::vector<Bit> romRead(const Rom& rom,
                             std::span<const Bit* const> addr) const;
    std::vector<Bit> ramCycle(Ram& ram, std::span<const Bit* const> addr,
                              const Bit& wflag,
                              std::span<const Bit* const> wdata) const;
};

// Structural identity of a netlist, stored in snapshots so resume rejects a
// different circuit.
uint64_t netlistHash(const Netlist& nl);

// ---------------------------------------------------------------------------
// Evaluator

template <class B>
class Evaluator {
public:
    using Bit = typename B::Bit;
    using Ram = typename B::Ram;
    using Rom = typename B::Rom;

    Evaluator(const Netlist& nl, B backend)
        : nl_(nl), backend_(std::move(backend)), dag_(buildDag(nl))
    {
        dffState_.assign(dag_.dffCells.size(), backend_.constant(false));
        values_.resize(nl_.netCount);
        for (const auto& p : nl_.inputs)
            for (int net : p.bits)
                inputValues_[net] = backend_.constant(false);
        for (size_t i = 0; i < nl_.cells.size(); i++) {
            if (!nl_.cells[i].name.empty())
                cellByName_[nl_.cells[i].name] = static_cast<int>(i);
        }
        for (size_t i = 0; i < dag_.dffCells.size(); i++) {
            dffIndexOfCell_[dag_.dffCells[i]] = static_cast<int>(i);
            dffOfNet_[nl_.cells[dag_.dffCells[i]].outputs[0]] =
                static_cast<int>(i);
        }
    }

    const Netlist& netlist() const
    {
        return nl_;
    }
    const Dag& dag() const
    {
        return dag_;
    }
    B& backend()
    {
        return backend_;
    }
    const B& backend() const
    {
        return backend_;
    }

    uint64_t cycle() const
    {
        return cycle_;
    }
    void setCycle(uint64_t c)
    {
        cycle_ = c;
    }

    void setInput(const std::string& port, size_t idx, Bit v)
    {
        inputValues_[portBit(nl_.inputs, port, idx)] = std::move(v);
    }
    void setInputBool(const std::string& port, size_t idx, bool v)
    {
        setInput(port, idx, backend_.constant(v));
    }

    // Reads an output port. DFF- and input-driven outputs reflect current
    // state; gate-driven outputs require at least one evaluated cycle.
    const Bit& output(const std::string& port, size_t idx) const
    {
        const int net = portBit(nl_.outputs, port, idx);
        if (auto it = dffOfNet_.find(net); it != dffOfNet_.end())
            return dffState_[it->second];
        if (auto it = inputValues_.find(net); it != inputValues_.end())
            return it->second;
        if (!tableValid_)
            throw std::runtime_error(
                "output '" + port + "' needs an evaluated cycle");
        return values_[net];
    }

    std::vector<std::string> dffNames() const
    {
        std::vector<std::string> names;
        for (int ci : dag_.dffCells)
            names.push_back(nl_.cells[ci].name);
        return names;
    }
    const std::vector<Bit>& dffState() const
    {
        return dffState_;
    }
    void setDffStateRaw(std::vector<Bit> state)
    {
        if (state.size() != dffState_.size())
            throw std::runtime_error("DFF state size mismatch");
        dffState_ = std::move(state);
    }
    void setDffByName(const std::string& name, Bit v)
    {
        auto it = cellByName_.find(name);
        if (it == cellByName_.end() ||
            nl_.cells[it->second].kind != CellKind::Dff)
            throw std::runtime_error("no DFF named '" + name + "'");
        dffState_[dffIndexOfCell_.at(it->second)] = std::move(v);
    }

    void setRom(Rom rom)
    {
        if (dag_.romCell < 0)
            throw std::runtime_error("netlist has no ROM port");
        rom_ = std::move(rom);
    }
    void setRam(Ram ram)
    {
        if (dag_.ramCell < 0)
            throw std::runtime_error("netlist has no RAM port");
        ram_ = std::move(ram);
    }
    const Rom& rom() const
    {
        return rom_.value();
    }
    const Ram& ram() const
    {
        return ram_.value();
    }
    bool hasRam() const
    {
        return ram_.has_value();
    }
    bool hasRom() const
    {
        return rom_.has_value();
    }

    void run(uint64_t cycles, const RunOptions& opt = {})
    {
        for (uint64_t i = 0; i < cycles; i++) {
            CycleStats stats;
            evaluateCycle(opt, stats);
            if (opt.stats)
                opt.stats->push_back(stats);
            cycle_++;
        }
    }

private:
    static int portBit(const std::vector<Port>& ports, const std::string& name,
                       size_t idx)
    {
        for (const auto& p : ports)
            if (p.name == name) {
                if (idx >= p.bits.size())
                    throw std::runtime_error("port '" + name +
                                             "' bit out of range");
                return p.bits[idx];
            }
        throw std::runtime_error("no port named '" + name + "'");
    }

    void evaluateCycle(const RunOptions& opt, CycleStats& stats)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const size_t n = dag_.dagCells.size();
        stats.gMax = dag_.gMax;
        stats.depth = dag_.depth;

        // Sources: module inputs and DFF outputs.
        for (auto& [net, v] : inputValues_)
            values_[net] = v;
        for (size_t i = 0; i < dag_.dffCells.size(); i++)
            values_[nl_.cells[dag_.dffCells[i]].outputs[0]] = dffState_[i];

        std::vector<int> indeg = dag_.indegree;
        std::mutex m;
        std::condition_variable cv;
        size_t remaining = n;
        // Ready heap: highest height first, then lowest cell id.
        std::vector<int> heap;
        auto heapLess = [&](int x, int y) {
            if (dag_.height[x] != dag_.height[y])
                return dag_.height[x] < dag_.height[y];
            return nl_.cells[dag_.dagCells[x]].id >
                   nl_.cells[dag_.dagCells[y]].id;
        };
        for (size_t i = 0; i < n; i++)
            if (indeg[i] == 0)
                heap.push_back(static_cast<int>(i));
        std::make_heap(heap.begin(), heap.end(), heapLess);
        std::mt19937_64 shuffleRng(opt.shuffleSeed);

        auto workerLoop = [&] {
            std::unique_lock lk(m);
            for (;;) {
                cv.wait(lk, [&] { return !heap.empty() || remaining == 0; });
                if (heap.empty()) {
                    if (remaining == 0)
                        return;
                    continue;
                }
                int node;
                if (opt.shuffleSeed != 0) {
                    const size_t pick = shuffleRng() % heap.size();
                    node = heap[pick];
                    heap[pick] = heap.back();
                    heap.pop_back();
                    std::make_heap(heap.begin(), heap.end(), heapLess);
                }
                else {
                    std::pop_heap(heap.begin(), heap.end(), heapLess);
                    node = heap.back();
                    heap.pop_back();
                }
                lk.unlock();

                const Cell& cell = nl_.cells[dag_.dagCells[node]];
                std::vector<Bit> outs = evaluateCell(cell);

                lk.lock();
                for (size_t k = 0; k < cell.outputs.size(); k++)
                    values_[cell.outputs[k]] = std::move(outs[k]);
                stats.evaluatedByKind[static_cast<int>(cell.kind)]++;
                for (int consumer : dag_.consumers[node])
                    if (--indeg[consumer] == 0) {
                        heap.push_back(consumer);
                        std::push_heap(heap.begin(), heap.end(), heapLess);
                    }
                remaining--;
                cv.notify_all();
            }
        };

        const unsigned workers = std::max(1u, opt.workers);
        parallelFor(workers, workers, [&](size_t) { workerLoop(); });
        if (remaining != 0)
            throw std::runtime_error("scheduler stalled");
        tableValid_ = true;

        // Latch: sample every D after the full evaluation, then update Qs.
        std::vector<Bit> next = dffState_;
        for (size_t i = 0; i < dag_.dffCells.size(); i++)
            next[i] = values_[nl_.cells[dag_.dffCells[i]].inputs[0]];
        dffState_ = std::move(next);

        stats.wallSeconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
    }

    std::vector<Bit> evaluateCell(const Cell& cell)
    {
        switch (cell.kind) {
        case CellKind::Const0:
            return {backend_.constant(false)};
        case CellKind::Const1:
            return {backend_.constant(true)};
        case CellKind::RomPort: {
            if (!rom_)
                throw std::runtime_error("ROM image not bound");
            std::vector<const Bit*> addr = resolve(cell.inputs);
            return backend_.romRead(*rom_, addr);
        }
        case CellKind::RamPort: {
            if (!ram_)
                throw std::runtime_error("RAM image not bound");
            const size_t w = cell.outputs.size();
            const size_t v = cell.inputs.size() - w - 1;
            std::vector<const Bit*> all = resolve(cell.inputs);
            std::span<const Bit* const> addr(all.data(), v);
            std::span<const Bit* const> wdata(all.data() + v, w);
            return backend_.ramCycle(*ram_, addr, *all[v + w], wdata);
        }
        default: {
            std::vector<const Bit*> in = resolve(cell.inputs);
            std::vector<Bit> out;
            out.push_back(backend_.gate(cell.kind, in));
            return out;
        }
        }
    }

    std::vector<const Bit*> resolve(const std::vector<int>& nets) const
    {
        std::vector<const Bit*> ptrs;
        ptrs.reserve(nets.size());
        for (int net : nets)
            ptrs.push_back(&values_[net]);
        return ptrs;
    }

    Netlist nl_;
    B backend_;
    Dag dag_;
    std::vector<Bit> dffState_;
    std::vector<Bit> values_;
    bool tableValid_ = false;
    uint64_t cycle_ = 0;
    std::unordered_map<int, Bit> inputValues_;
    std::unordered_map<std::string, int> cellByName_;
    std::unordered_map<int, int> dffIndexOfCell_;
    std::unordered_map<int, int> dffOfNet_;
};

}  // namespace hvp::netlist

#endif
