#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cmll/cmll.hpp"
#include "cmll/kcmll.hpp"
#include "cmll/learner.hpp"

namespace cmll {

/// Named text metadata plus named matrices, written as
///
///   CMLLMDL
///   version 1
///   meta <key> <value>          (any number)
///   field <name> <rows> <cols>  (any number, payload order)
///   payload
///   <rows*cols little-endian float64 per field>
class ModelArchive {
 public:
  static constexpr int kVersion = 1;

  void set_meta(const std::string& key, const std::string& value);
  void set_meta(const std::string& key, std::uint64_t value);
  void put(const std::string& name, const Matrix& m);
  void put(const std::string& name, const std::vector<double>& v);
  void put(const std::string& name, double x);

  bool has_meta(const std::string& key) const { return meta_.count(key) != 0; }
  bool has_field(const std::string& name) const;

  /// Accessors throw DeserializeError when the entry is missing or malformed.
  const std::string& meta(const std::string& key) const;
  std::uint64_t meta_uint(const std::string& key) const;
  const Matrix& matrix(const std::string& name) const;
  std::vector<double> vector(const std::string& name) const;
  double scalar(const std::string& name) const;

  void write(std::ostream& out) const;
  /// Throws VersionError for an unknown version, DeserializeError for any other defect.
  static ModelArchive read(std::istream& in);

 private:
  std::map<std::string, std::string> meta_;
  std::vector<std::pair<std::string, Matrix>> fields_;
};

void save_model(std::ostream& out, const CmllModel& model);
void save_model(std::ostream& out, const KcmllModel& model);
void save_model(std::ostream& out, const Pipeline& pipe);

CmllModel load_cmll_model(std::istream& in);
KcmllModel load_kcmll_model(std::istream& in);
Pipeline load_pipeline(std::istream& in);

void save_pipeline_file(const std::string& path, const Pipeline& pipe);
Pipeline load_pipeline_file(const std::string& path);

}  // namespace cmll
