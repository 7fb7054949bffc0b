#ifndef HVP_TFHE_SERIALIZE_HPP
#define HVP_TFHE_SERIALIZE_HPP

#include <string>
#include <vector>

#include "hvp/common/binio.hpp"
#include "hvp/tfhe/ciphertext.hpp"
#include "hvp/tfhe/ops.hpp"

namespace hvp::tfhe {

// Every file begins with magic "HVP1", a type tag, a format version and the
// parameter-set name; the payload is raw little-endian torus words.
inline constexpr char kMagic[4] = {'H', 'V', 'P', '1'};
inline constexpr uint16_t kFormatVersion = 1;

enum : uint8_t {
    kTagSecretKey = 1,
    kTagBootstrappingKey = 2,
    kTagTlwe = 3,
    kTagTrlwe = 4,
    kTagTrgsw = 5,
    kTagRam = 6,
    kTagRom = 7,
    kTagRequest = 8,
    kTagResult = 9,
};

struct FileHeader {
    uint8_t tag = 0;
    uint16_t version = 0;
    std::string paramName;
};

void writeHeader(BinWriter& w, uint8_t tag, const std::string& paramName);
// Throws std::runtime_error on bad magic.
FileHeader readHeader(BinReader& r);
// Reads and checks magic, tag and version; returns the header.
FileHeader expectHeader(BinReader& r, uint8_t tag);

void writeTlwe(BinWriter& w, const Tlwe& c);
Tlwe readTlwe(BinReader& r);
void writeTrlwe(BinWriter& w, const Trlwe& c);
Trlwe readTrlwe(BinReader& r);
void writeTrgsw(BinWriter& w, const Trgsw& c);
Trgsw readTrgsw(BinReader& r);
void writeTrgswLvl2(BinWriter& w, const TrgswLvl2& c);
TrgswLvl2 readTrgswLvl2(BinReader& r);

std::vector<uint8_t> serializeSecretKey(const SecretKey& sk);
SecretKey deserializeSecretKey(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> serializeBootstrappingKey(const BootstrappingKey& bk);
BootstrappingKey deserializeBootstrappingKey(const std::vector<uint8_t>& bytes);

// Standalone ciphertext files (used by tests and tooling).
std::vector<uint8_t> serializeTlwe(const Tlwe& c, const ParameterSet& params);
Tlwe deserializeTlwe(const std::vector<uint8_t>& bytes);

}  // namespace hvp::tfhe

#endif
