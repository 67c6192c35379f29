#include "revsynth/text.hpp"

#include <algorithm>

namespace revsynth {

// 1,000 common English words. The language filter keeps a review or response
// only when enough of its word tokens land in this list.
const std::vector<std::string>& english_word_list() {
    static const std::vector<std::string> words = {
    "a", "able", "about", "above", "access", "account", "across", "act",
    "actually", "add", "address", "ads", "advert", "advertising", "afraid", "after",
    "afternoon", "again", "age", "ago", "agree", "ahead", "air", "all",
    "allow", "allowed", "almost", "alone", "along", "already", "also", "although",
    "always", "am", "amazing", "american", "among", "amount", "an", "and",
    "animal", "annoying", "another", "answer", "any", "anyone", "anything", "apart",
    "apologies", "apologize", "app", "appear", "apple", "appreciate", "appreciated", "apps",
    "are", "area", "arm", "army", "around", "arrive", "art", "as",
    "ask", "asked", "asks", "assist", "assistance", "at", "attack", "attention",
    "audio", "aunt", "autumn", "available", "away", "awesome", "baby", "back",
    "bad", "bag", "ball", "band", "bank", "banking", "base", "basic",
    "battery", "be", "beach", "bear", "beat", "beautiful", "because", "become",
    "bed", "bedroom", "been", "beer", "before", "begin", "beginning", "behavior",
    "behind", "being", "belief", "believe", "bell", "belong", "below", "bench",
    "benefit", "beside", "best", "better", "between", "big", "bird", "birth",
    "birthday", "bit", "bite", "black", "blank", "blue", "board", "boat",
    "body", "bone", "book", "booking", "border", "born", "borrow", "boss",
    "both", "bottle", "bottom", "box", "boy", "brain", "branch", "brave",
    "bread", "break", "breakfast", "breath", "bridge", "brief", "bright", "brightness",
    "bring", "brother", "brown", "browser", "brush", "budget", "bug", "bugs",
    "build", "burn", "bus", "business", "busy", "but", "butter", "button",
    "buy", "by", "cache", "cake", "call", "called", "calls", "calm",
    "came", "camera", "camp", "can", "cancel", "cancelled", "capital", "captain",
    "car", "card", "care", "careful", "carry", "cart", "case", "cat",
    "catch", "cause", "caused", "cell", "center", "central", "century", "certain",
    "chain", "chair", "chance", "change", "character", "charge", "chat", "cheap",
    "check", "checkout", "cheers", "cheese", "chest", "chicken", "chief", "child",
    "choice", "choose", "church", "circle", "city", "claim", "class", "clean",
    "clear", "click", "client", "climb", "clock", "close", "closed", "cloth",
    "cloud", "club", "coach", "coast", "coat", "code", "codes", "coffee",
    "cold", "collect", "college", "color", "column", "come", "comes", "comfort",
    "comment", "committee", "common", "community", "company", "complete", "computer", "concern",
    "condition", "conference", "confirm", "congress", "connect", "connection", "consider", "console",
    "consumer", "contact", "contain", "context", "continue", "control", "cook", "cool",
    "corner", "correct", "cost", "could", "count", "country", "couple", "course",
    "courses", "court", "cover", "cow", "crash", "crashed", "crashes", "create",
    "credit", "crime", "cross", "crowd", "cultural", "cup", "current", "customer",
    "cut", "cycle", "dad", "dance", "danger", "dark", "data", "date",
    "daughter", "day", "days", "dead", "deal", "dear", "death", "debate",
    "decide", "decision", "deep", "defense", "degree", "delete", "deleted", "deliver",
    "delivery", "demand", "democratic", "department", "depend", "describe", "described", "design",
    "desk", "despite", "destroy", "detail", "details", "determine", "develop", "device",
    "dictionary", "did", "die", "differ", "different", "difficult", "dinner", "direction",
    "director", "disable", "disabled", "discover", "discuss", "disease", "dish", "dislike",
    "distance", "do", "doctor", "dog", "doing", "dollar", "door", "double",
    "doubt", "down", "downgrade", "download", "downloaded", "downloads", "dozen", "draw",
    "dream", "dress", "drink", "drive", "driver", "drop", "dry", "due",
    "during", "each", "ear", "early", "earth", "east", "easy", "eat",
    "economy", "edge", "edit", "editor", "education", "eight", "either", "email",
    "enable", "enabled", "end", "enough", "entire", "environmental", "error", "errors",
    "especially", "even", "evening", "ever", "every", "everything", "excellent", "expect",
    "experience", "experiencing", "explain", "eye", "face", "facing", "fact", "fall",
    "far", "fast", "father", "feature", "features", "feedback", "feel", "feels",
    "felt", "few", "fight", "file", "files", "final", "finally", "financial",
    "find", "finds", "fine", "first", "five", "fix", "fixed", "fixes",
    "follow", "for", "force", "foreign", "forever", "forget", "found", "four",
    "free", "freezes", "friend", "from", "frozen", "full", "fun", "further",
    "game", "games", "gave", "general", "get", "girl", "give", "given",
    "gives", "glad", "glitch", "go", "goes", "going", "gone", "good",
    "got", "gotten", "government", "grant", "great", "green", "grow", "guy",
    "had", "hand", "happen", "happy", "hard", "has", "hate", "have",
    "he", "head", "health", "hear", "hearing", "hello", "help", "helpful",
    "her", "here", "hey", "hi", "high", "him", "his", "history",
    "hold", "home", "hope", "hot", "hour", "hours", "house", "how",
    "however", "huge", "hundred", "i", "idea", "if", "important", "improve",
    "improved", "improvement", "in", "include", "inconvenience", "increase", "information", "inside",
    "install", "installed", "instead", "internet", "into", "investigate", "investigating", "is",
    "issue", "issues", "it", "item", "items", "its", "job", "just",
    "keep", "keyboard", "kill", "kind", "kindly", "knew", "know", "known",
    "knows", "lag", "laggy", "large", "last", "late", "later", "latest",
    "law", "lead", "learn", "learning", "least", "leave", "leaves", "left",
    "legal", "less", "lesson", "lessons", "let", "level", "life", "light",
    "like", "likely", "line", "link", "links", "little", "live", "load",
    "loading", "loads", "login", "look", "looked", "looking", "looks", "lose",
    "lot", "love", "low", "made", "main", "major", "make", "makes",
    "man", "many", "map", "maps", "maybe", "me", "mean", "medical",
    "meet", "member", "memory", "message", "messages", "million", "minute", "minutes",
    "mobile", "mode", "moment", "money", "month", "months", "more", "morning",
    "most", "mother", "move", "much", "music", "must", "my", "name",
    "natural", "near", "need", "network", "never", "new", "news", "next",
    "nice", "night", "nine", "no", "none", "not", "notification", "notifications",
    "now", "number", "of", "offer", "office", "offline", "often", "old",
    "on", "once", "one", "online", "only", "open", "opened", "opens",
    "option", "options", "or", "order", "orders", "other", "others", "our",
    "out", "over", "own", "page", "pages", "paid", "parent", "part",
    "party", "password", "past", "pay", "payment", "people", "perfect", "perhaps",
    "permission", "permissions", "person", "personal", "phone", "photo", "photos", "physical",
    "picture", "pictures", "place", "play", "please", "point", "poor", "popular",
    "possible", "power", "president", "previous", "price", "privacy", "private", "probably",
    "problem", "problems", "profile", "program", "provide", "public", "purchase", "purchased",
    "put", "question", "quick", "quite", "raise", "rather", "rating", "ratings",
    "reach", "read", "reading", "ready", "real", "really", "reason", "reboot",
    "receive", "received", "recent", "recommend", "recommended", "red", "refund", "regarding",
    "regards", "reinstall", "religious", "remain", "remember", "remove", "removed", "reply",
    "report", "reported", "require", "research", "reset", "resolve", "resolved", "respond",
    "response", "responses", "responsive", "restart", "result", "return", "review", "reviews",
    "ride", "right", "room", "run", "safe", "said", "same", "save",
    "saved", "saw", "say", "says", "scan", "scanner", "screen", "scroll",
    "search", "second", "seconds", "secure", "security", "see", "seemed", "seems",
    "seen", "sees", "sell", "send", "sent", "serious", "serve", "service",
    "set", "setting", "settings", "seven", "several", "share", "shared", "she",
    "shop", "shopping", "short", "show", "side", "significant", "similar", "simple",
    "since", "sincerely", "single", "sit", "six", "slow", "small", "smooth",
    "so", "solution", "solve", "solved", "some", "soon", "sorry", "sound",
    "space", "speak", "spend", "spinner", "stable", "stand", "star", "stars",
    "start", "stay", "still", "stop", "stopped", "storage", "store", "story",
    "strong", "stuck", "study", "subscription", "such", "suggest", "suggestion", "suggestions",
    "support", "sure", "swipe", "switch", "sync", "system", "tab", "tabs",
    "take", "taken", "takes", "talk", "tap", "teach", "teacher", "team",
    "tell", "tells", "ten", "terrible", "than", "thank", "thanks", "that",
    "the", "their", "them", "theme", "then", "there", "therefore", "these",
    "they", "think", "thinks", "third", "this", "thought", "thousand", "three",
    "time", "to", "today", "together", "told", "tomorrow", "tonight", "too",
    "took", "track", "traditional", "transfer", "tried", "tries", "trip", "true",
    "try", "turn", "two", "type", "typing", "under", "understand", "uninstall",
    "unresponsive", "unstable", "until", "up", "update", "updates", "upgrade", "upon",
    "us", "use", "used", "useful", "useless", "user", "users", "uses",
    "various", "verification", "verify", "version", "very", "video", "videos", "visit",
    "voice", "volume", "wait", "walk", "want", "wanted", "wants", "war",
    "was", "watch", "water", "way", "we", "weather", "week", "weeks",
    "well", "were", "what", "when", "where", "which", "while", "white",
    "who", "whole", "whom", "whose", "why", "wifi", "will", "win",
    "wish", "with", "within", "without", "woman", "wonder", "word", "work",
    "worked", "working", "works", "world", "would", "write", "wrong", "year",
    "years", "yes", "yesterday", "yet", "you", "young", "your", "zero",
    };
    return words;
}

bool is_english_word(const std::string& tok) {
    const auto& words = english_word_list();
    return std::binary_search(words.begin(), words.end(), tok);
}

} // namespace revsynth
