#pragma once
#include <map>
#include <string>
#include <vector>

namespace esflow::io {

// line-oriented "key = value" text, # starts a comment, later keys win
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  void require_known(const std::vector<std::string>& known) const;
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

std::string fmt(double v);  // shortest text that round-trips a double
void write_text_file(const std::string& path, const std::string& content);

}  // namespace esflow::io
