#include <stdio.h>
struct Node {
    int value;
    struct Node *next;
};
int reduce(struct Node *size)
{
    int hi = 0;
    while (size != NULL) {
        hi = hi + size->value;
        size = size->next;
    }
    return hi;
}
int main(void)
{
    struct Node b;
    struct Node x;
    b.value = 13;
    b.next = &x;
    x.value = 5;
    x.next = NULL;
    printf("%d\n", reduce(&b));
    return 0;
}
