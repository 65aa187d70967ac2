#pragma once

#include <fstream>
#include <sstream>
#include <string>

#ifndef DCSHARP_CORPUS_DIR
#define DCSHARP_CORPUS_DIR "corpus"
#endif

namespace dcsharp::test {

inline std::string corpus_path(const std::string& name) {
  return std::string(DCSHARP_CORPUS_DIR) + "/" + name;
}

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(corpus_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dcsharp::test
