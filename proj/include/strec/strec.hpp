#pragma once

#include "strec/corpus.hpp"
#include "strec/errors.hpp"
#include "strec/evaluation.hpp"
#include "strec/expansion.hpp"
#include "strec/experiment.hpp"
#include "strec/index.hpp"
#include "strec/recommender.hpp"
#include "strec/stats.hpp"
#include "strec/text.hpp"
#include "strec/topics.hpp"
