#include <stdio.h>
struct Box {
    int value;
    struct Box *next;
};
int walk(struct Box *k)
{
    int acc = 0;
    while (k != NULL) {
        acc = acc + k->value;
        k = k->next;
    }
    return acc;
}
int main(void)
{
    struct Box n;
    struct Box num;
    n.value = 22;
    n.next = &num;
    num.value = 10;
    num.next = NULL;
    printf("%d\n", walk(&n));
    return 0;
}
