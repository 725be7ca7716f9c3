package ledger;

class Audit {
    String last = null;

    boolean record(String name) {
        if (name.isEmpty()) {
            return false;
        }
        if (name.equals(last)) {
            return false;
        }
        last = name;
        return true;
    }
}
