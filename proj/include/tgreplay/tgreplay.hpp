#pragma once

#include "tgreplay/bench.hpp"
#include "tgreplay/distributions.hpp"
#include "tgreplay/error.hpp"
#include "tgreplay/exposure.hpp"
#include "tgreplay/frontier.hpp"
#include "tgreplay/harness/agent.hpp"
#include "tgreplay/harness/config.hpp"
#include "tgreplay/harness/env.hpp"
#include "tgreplay/harness/experiment.hpp"
#include "tgreplay/metrics.hpp"
#include "tgreplay/multitask.hpp"
#include "tgreplay/pmf.hpp"
#include "tgreplay/random.hpp"
#include "tgreplay/ring_buffer.hpp"
#include "tgreplay/sampler.hpp"
#include "tgreplay/stats.hpp"
#include "tgreplay/sum_tree.hpp"
#include "tgreplay/trunc_geom.hpp"
