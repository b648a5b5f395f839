#pragma once

#include "sumhis/cluster.hpp"
#include "sumhis/embed.hpp"
#include "sumhis/error.hpp"
#include "sumhis/formats.hpp"
#include "sumhis/oracle.hpp"
#include "sumhis/pipeline.hpp"
#include "sumhis/rank.hpp"
#include "sumhis/rouge.hpp"
#include "sumhis/textproc.hpp"
