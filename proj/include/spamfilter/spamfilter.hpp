#pragma once

#include "spamfilter/bayes.hpp"
#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/evaluate.hpp"
#include "spamfilter/features.hpp"
#include "spamfilter/memory_based.hpp"
#include "spamfilter/report.hpp"
