#pragma once

#include "metakernel/metamodel.hpp"
#include "metakernel/model.hpp"
#include "metakernel/syntax.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testsupport {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline std::string sample_path(const std::string& name) {
    return std::string(SAMPLES_DIR) + "/" + name;
}

inline metakernel::Metamodel load_metamodel_sample(const std::string& name) {
    return metakernel::parse_metamodel(read_file(sample_path(name)));
}

inline metakernel::Model load_model_sample(const std::string& name,
                                           const metakernel::Metamodel& mm) {
    return metakernel::parse_model(read_file(sample_path(name)), mm);
}

inline metakernel::Metamodel load_signalflow() { return load_metamodel_sample("signalflow.mm"); }

}  // namespace testsupport
