#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qdlm {

// Bijection between RESTAURANT_<i>_<PROPERTY> placeholders and the surface
// values of the restaurants most recently returned by an api_call.
class PlaceholderMap {
 public:
  // Returns false (and leaves the map unchanged) when either side is already
  // bound; the first binding for a surface wins.
  bool bind(std::string placeholder, std::string surface);

  std::optional<std::string> surface_for(const std::string& placeholder) const;
  std::optional<std::string> placeholder_for(const std::string& surface) const;

  bool empty() const { return placeholder_to_surface_.empty(); }
  std::size_t size() const { return placeholder_to_surface_.size(); }
  const std::map<std::string, std::string>& bindings() const {
    return placeholder_to_surface_;
  }

  bool operator==(const PlaceholderMap&) const = default;

 private:
  std::map<std::string, std::string> placeholder_to_surface_;
  std::map<std::string, std::string> surface_to_placeholder_;
};

// Key-value store of confirmed user requirements plus bookkeeping for the
// restaurants a completed api_call produced.
struct DialogState {
  std::map<std::string, std::string> slots;  // entity type name -> value
  PlaceholderMap placeholders;
  std::vector<std::string> presented;  // restaurant names, rating-descending
  int last_proposed = 0;               // 1-based index into presented; 0 = none
  std::optional<std::string> selected_restaurant;

  bool operator==(const DialogState&) const = default;
};

// Parses "RESTAURANT_<i>_<SUFFIX>" tokens; returns 0 when the token is not a
// placeholder. `suffix` receives the trailing property part when non-null.
int placeholder_index(const std::string& token, std::string* suffix = nullptr);

std::string make_placeholder(int index, const std::string& suffix);

}  // namespace qdlm
