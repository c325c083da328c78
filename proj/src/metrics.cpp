/*
 * Copyright 2026 The Trajkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "trajkit/metrics.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "trajkit/error.hpp"
#include "trajkit/serialization.hpp"

namespace trajkit {
namespace {

void check_comparable(const PoseSequenced& estimate,
                      const PoseSequenced& reference) {
  validate_sequence(estimate);
  validate_sequence(reference);
  if (estimate.poses.size() != reference.poses.size()) {
    throw ValidationError(
        "sequences must have the same frame count, got " +
        std::to_string(estimate.poses.size()) + " vs " +
        std::to_string(reference.poses.size()));
  }
}

// Lowercased alphabetic runs; everything else separates words.
std::vector<std::string> words_of(const std::string& caption) {
  std::vector<std::string> words;
  std::string current;
  for (char c : caption) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) {
    words.push_back(std::move(current));
  }
  return words;
}

}  // namespace

TrajectoryError trajectory_error(const PoseSequenced& estimate,
                                 const PoseSequenced& reference) {
  check_comparable(estimate, reference);
  const PoseSequenced aligned = align_first_frame(estimate, reference);

  TrajectoryError out;
  const std::size_t frames = reference.poses.size();
  for (std::size_t f = 0; f < frames; ++f) {
    const double trans =
        (aligned.poses[f].translation - reference.poses[f].translation).norm();
    const double rot = rotation_angle_between_deg(estimate.poses[f].rotation,
                                                  reference.poses[f].rotation);
    out.per_frame_trans_m.push_back(trans);
    out.per_frame_rot_deg.push_back(rot);
    out.trans_err_m += trans;
    out.rot_err_deg += rot;
  }
  out.trans_err_m /= static_cast<double>(frames);
  out.rot_err_deg /= static_cast<double>(frames);
  return out;
}

double trans_err(const PoseSequenced& estimate,
                 const PoseSequenced& reference) {
  return trajectory_error(estimate, reference).trans_err_m;
}

double rot_err(const PoseSequenced& estimate, const PoseSequenced& reference) {
  return trajectory_error(estimate, reference).rot_err_deg;
}

std::string write_metric_report(const std::vector<ClipEntityError>& rows) {
  std::string out = "clip_id,entity_id,trans_err_m,rot_err_deg\n";
  for (const ClipEntityError& row : rows) {
    out += row.clip_id;
    out += ',';
    out += row.entity_id;
    out += ',';
    out += format_float(row.error.trans_err_m);
    out += ',';
    out += format_float(row.error.rot_err_deg);
    out += '\n';
  }
  return out;
}

const std::vector<KeywordClass>& default_keyword_classes() {
  static const std::vector<KeywordClass> classes = {
      {"man", {"man", "men"}},
      {"woman", {"woman", "women"}},
      {"child", {"child", "children", "kid", "kids"}},
      {"boy", {"boy", "boys"}},
      {"girl", {"girl", "girls"}},
      {"runner", {"runner", "runners", "jogger", "joggers"}},
      {"dancer", {"dancer", "dancers"}},
      {"cyclist", {"cyclist", "cyclists"}},
      {"worker", {"worker", "workers"}},
      {"chef", {"chef", "chefs", "cook", "cooks"}},
      {"doctor", {"doctor", "doctors", "nurse", "nurses"}},
      {"officer", {"officer", "officers"}},
      {"firefighter", {"firefighter", "firefighters"}},
      {"farmer", {"farmer", "farmers"}},
      {"teacher", {"teacher", "teachers"}},
      {"student", {"student", "students"}},
      {"athlete", {"athlete", "athletes"}},
      {"soldier", {"soldier", "soldiers"}},
      {"musician", {"musician", "musicians", "guitarist", "violinist"}},
      {"painter", {"painter", "painters"}},
      {"skater", {"skater", "skaters"}},
      {"hiker", {"hiker", "hikers"}},
      {"swimmer", {"swimmer", "swimmers"}},
      {"waiter", {"waiter", "waiters", "waitress"}},
      {"vendor", {"vendor", "vendors"}},
      {"guard", {"guard", "guards"}},
      {"clown", {"clown", "clowns"}},
      {"monk", {"monk", "monks"}},
      {"knight", {"knight", "knights"}},
      {"astronaut", {"astronaut", "astronauts"}},
      {"dog", {"dog", "dogs", "puppy", "puppies"}},
      {"cat", {"cat", "cats", "kitten", "kittens"}},
      {"horse", {"horse", "horses", "pony", "ponies"}},
      {"fox", {"fox", "foxes"}},
      {"rabbit", {"rabbit", "rabbits", "bunny", "bunnies"}},
      {"deer", {"deer", "stag", "doe"}},
      {"bear", {"bear", "bears"}},
      {"wolf", {"wolf", "wolves"}},
      {"lion", {"lion", "lions", "lioness"}},
      {"tiger", {"tiger", "tigers"}},
      {"elephant", {"elephant", "elephants"}},
      {"giraffe", {"giraffe", "giraffes"}},
      {"zebra", {"zebra", "zebras"}},
      {"monkey", {"monkey", "monkeys"}},
      {"panda", {"panda", "pandas"}},
      {"kangaroo", {"kangaroo", "kangaroos"}},
      {"camel", {"camel", "camels"}},
      {"goat", {"goat", "goats"}},
      {"sheep", {"sheep", "lamb", "lambs"}},
      {"cow", {"cow", "cows", "bull", "bulls"}},
      {"pig", {"pig", "pigs", "piglet", "piglets"}},
      {"donkey", {"donkey", "donkeys", "mule", "mules"}},
      {"chicken", {"chicken", "chickens", "rooster", "hen"}},
      {"duck", {"duck", "ducks", "duckling"}},
      {"goose", {"goose", "geese"}},
      {"eagle", {"eagle", "eagles", "hawk", "hawks"}},
      {"owl", {"owl", "owls"}},
      {"penguin", {"penguin", "penguins"}},
      {"turtle", {"turtle", "turtles", "tortoise"}},
      {"squirrel", {"squirrel", "squirrels"}},
      {"hedgehog", {"hedgehog", "hedgehogs"}},
      {"raccoon", {"raccoon", "raccoons"}},
      {"otter", {"otter", "otters"}},
      {"leopard", {"leopard", "leopards", "cheetah", "cheetahs"}},
  };
  return classes;
}

std::map<std::string, int> entity_distribution(
    const std::vector<std::string>& captions,
    const std::vector<KeywordClass>& classes) {
  if (classes.empty()) {
    throw ValidationError("keyword taxonomy must not be empty");
  }
  std::map<std::string, int> histogram;
  for (const KeywordClass& cls : classes) {
    if (cls.name.empty() || cls.keywords.empty()) {
      throw ValidationError("keyword class needs a name and keywords");
    }
    histogram[cls.name] = 0;
  }
  if (histogram.size() != classes.size()) {
    throw ValidationError("keyword class names must be unique");
  }

  for (const std::string& caption : captions) {
    const std::vector<std::string> tokens = words_of(caption);
    const std::set<std::string> token_set(tokens.begin(), tokens.end());
    for (const KeywordClass& cls : classes) {
      for (const std::string& keyword : cls.keywords) {
        if (token_set.count(keyword)) {
          ++histogram[cls.name];
          break;  // one count per caption per class
        }
      }
    }
  }
  return histogram;
}

std::string write_histogram_csv(const std::map<std::string, int>& histogram) {
  std::string out = "class,count\n";
  for (const auto& [name, count] : histogram) {
    out += name;
    out += ',';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

}  // namespace trajkit
