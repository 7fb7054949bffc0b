#include "hvp/common/binio.hpp"

#include <cstdio>
#include <fstream>

namespace hvp {

std::vector<uint8_t> readFile(const std::string& path)
{
    std::ifstream ifs(path, std::ios::binary);
    if (!ifs)
        throw std::runtime_error("cannot open file: " + path);
    ifs.seekg(0, std::ios::end);
    auto size = static_cast<size_t>(ifs.tellg());
    ifs.seekg(0);
    std::vector<uint8_t> buf(size);
    if (size != 0)
        ifs.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(size));
    if (!ifs)
        throw std::runtime_error("cannot read file: " + path);
    return buf;
}

void writeFileAtomic(const std::string& path, const std::vector<uint8_t>& data)
{
    std::string tmp = path + ".tmp";
    {
        std::ofstream ofs(tmp, std::ios::binary | std::ios::trunc);
        if (!ofs)
            throw std::runtime_error("cannot open file for writing: " + tmp);
        if (!data.empty())
            ofs.write(reinterpret_cast<const char*>(data.data()),
                      static_cast<std::streamsize>(data.size()));
        if (!ofs)
            throw std::runtime_error("cannot write file: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace hvp
