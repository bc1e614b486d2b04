// Plain-language labels next to the technical terms, in English and German.

export type Lang = "en" | "de";

const TABLE = {
  en: {
    appTitle: "Class Chain Chat",
    joinHeading: "Pick a nickname to join your classroom chain",
    joinButton: "Join",
    joinHint: "Nothing is saved anywhere. Close the tab and you are gone.",
    chatHeading: "Chat",
    sendButton: "Send",
    composerPlaceholder: "Write a message (it becomes a transaction)...",
    pendingBadge: "pending - waiting for a miner",
    confirmedBadge: "sealed into block",
    missionsHeading: "Missions",
    lockedMission: "Unlocks at level",
    levelLabel: "Level",
    explorerHeading: "Explorer",
    explorerLockedHint: "Reach level 2 to unlock the explorer.",
    tabChain: "Chain",
    tabBlock: "Block",
    tabTransaction: "Transaction",
    tabPeers: "Peers",
    leaderboardHeading: "Leaderboard",
    miningHeading: "Mine a block by hand",
    miningTarget: "Target: the hash must start with",
    miningZeros: "leading hex zeros",
    tryNonce: "Try this nonce",
    autoStep: "Auto-try (slow)",
    stopAuto: "Stop",
    miningFound: "You found a valid nonce. The network would accept this block!",
    connectionRetrying: "Connection lost, retrying...",
    levelUpToast: "Level up! You reached level",
    unreadable: "[unreadable]",
    peersEmpty: "No other nodes found yet.",
    quizCheck: "Check answer",
    quizCorrect: "Correct!",
    quizIncorrect: "Not quite, try again.",
    langSwitch: "Deutsch",
  },
  de: {
    appTitle: "Klassen-Chain-Chat",
    joinHeading: "Wähle einen Spitznamen für deine Klassen-Chain",
    joinButton: "Beitreten",
    joinHint: "Nichts wird gespeichert. Tab zu, alles weg.",
    chatHeading: "Chat",
    sendButton: "Senden",
    composerPlaceholder: "Schreibe eine Nachricht (sie wird eine Transaktion)...",
    pendingBadge: "wartet auf einen Miner",
    confirmedBadge: "versiegelt in Block",
    missionsHeading: "Missionen",
    lockedMission: "Öffnet sich ab Level",
    levelLabel: "Level",
    explorerHeading: "Explorer",
    explorerLockedHint: "Erreiche Level 2, um den Explorer freizuschalten.",
    tabChain: "Kette",
    tabBlock: "Block",
    tabTransaction: "Transaktion",
    tabPeers: "Teilnehmer",
    leaderboardHeading: "Bestenliste",
    miningHeading: "Einen Block von Hand minen",
    miningTarget: "Ziel: der Hash muss beginnen mit",
    miningZeros: "führenden Hex-Nullen",
    tryNonce: "Diese Nonce testen",
    autoStep: "Automatisch (langsam)",
    stopAuto: "Stopp",
    miningFound: "Du hast eine gültige Nonce gefunden. Das Netzwerk würde den Block akzeptieren!",
    connectionRetrying: "Verbindung verloren, neuer Versuch...",
    levelUpToast: "Level geschafft! Du bist jetzt Level",
    unreadable: "[unlesbar]",
    peersEmpty: "Noch keine anderen Knoten gefunden.",
    quizCheck: "Antwort prüfen",
    quizCorrect: "Richtig!",
    quizIncorrect: "Leider nein, versuch es nochmal.",
    langSwitch: "English",
  },
} as const;

export type StringKey = keyof (typeof TABLE)["en"];

let current: Lang = "en";

export function setLang(lang: Lang): void {
  current = lang;
}

export function getLang(): Lang {
  return current;
}

export function t(key: StringKey): string {
  return TABLE[current][key];
}
